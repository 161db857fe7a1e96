#ifndef PHOTODYN_CORRELATION_HISTOGRAM_HPP
#define PHOTODYN_CORRELATION_HISTOGRAM_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "photodyn/sim/detector.hpp"

namespace photodyn::corr {

// Symmetric delay axis over [-tau_max, tau_max] made of uniform segments.
// A single segment gives the usual uniform histogram; `two_scale` puts fine
// bins around zero delay and coarse bins in the tails.
class BinLayout {
 public:
  static BinLayout uniform(double bin_width_ns, double tau_max_ns);
  static BinLayout two_scale(double fine_width_ns, double fine_extent_ns, double coarse_width_ns,
                             double tau_max_ns);

  std::size_t size() const { return total_bins_; }
  double tau_max_ns() const { return tau_max_; }
  std::vector<double> edges() const;
  // Bin holding delay dt, or nullopt outside [-tau_max, tau_max].
  std::optional<std::size_t> index(double dt_ns) const;

 private:
  struct Segment {
    double lo;
    double width;
    std::size_t first_bin;
    std::size_t bins;
  };
  std::vector<Segment> segments_;
  std::size_t total_bins_ = 0;
  double tau_max_ = 0.0;
};

struct RawHistogram {
  std::vector<double> bin_edges_ns;
  std::vector<std::uint64_t> counts;
};

enum class Normalization {
  kChannelRates,  // counts / (r_a r_b dt T)
  kPlateau,       // scaled so the wings (|tau| > 0.8 tau_max) average to one
};

struct CorrelationHistogram {
  std::vector<double> bin_edges_ns;
  std::vector<std::uint64_t> counts;
  std::vector<double> g2;
  std::vector<double> sigma_g2;
  std::uint64_t total_pairs = 0;
  double duration_ns = 0.0;
  double rate_a_cps = 0.0;
  double rate_b_cps = 0.0;

  std::size_t size() const { return counts.size(); }
  double center(std::size_t k) const { return 0.5 * (bin_edges_ns[k] + bin_edges_ns[k + 1]); }
  double width(std::size_t k) const { return bin_edges_ns[k + 1] - bin_edges_ns[k]; }
};

struct CorrelateOptions {
  Normalization normalization = Normalization::kChannelRates;
  // Stream A is split into this many contiguous slices swept concurrently;
  // counts are summed, so the result does not depend on the value.
  unsigned workers = 1;
};

// Full pairwise (not start-stop) coincidence count of t_b - t_a.
// Throws DataError("insufficient events") if either stream is empty.
RawHistogram count_pairs(const sim::PhotonStream& a, const sim::PhotonStream& b, const BinLayout& layout,
                         unsigned workers = 1);

CorrelationHistogram correlate(const sim::PhotonStream& a, const sim::PhotonStream& b, const BinLayout& layout,
                               const CorrelateOptions& options = {});
CorrelationHistogram correlate(const sim::PhotonStream& a, const sim::PhotonStream& b, double bin_width_ns,
                               double tau_max_ns);

// Pair counts split by the arrival time of the A event: block k holds the
// pairs whose A timestamp falls in [k T / K, (k + 1) T / K). Summed over
// blocks this is exactly count_pairs.
struct BlockCounts {
  std::vector<RawHistogram> blocks;
  std::vector<std::uint64_t> events_a;  // A events per block
  double block_duration_ns = 0.0;
  double rate_b_cps = 0.0;              // over the whole acquisition

  std::size_t size() const { return blocks.size(); }
  // Histogram of every block except `skip` (all blocks when skip >= size()).
  CorrelationHistogram histogram(std::size_t skip, Normalization mode = Normalization::kChannelRates) const;
};

BlockCounts count_pairs_blocked(const sim::PhotonStream& a, const sim::PhotonStream& b, const BinLayout& layout,
                                std::size_t n_blocks, unsigned workers = 1);

CorrelationHistogram normalize(const RawHistogram& raw, double rate_a_cps, double rate_b_cps, double duration_ns,
                               Normalization mode = Normalization::kChannelRates);

}  // namespace photodyn::corr

#endif  // PHOTODYN_CORRELATION_HISTOGRAM_HPP
