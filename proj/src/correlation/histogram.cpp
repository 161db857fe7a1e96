#include "photodyn/correlation/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "photodyn/error.hpp"
#include "photodyn/model/units.hpp"

namespace photodyn::corr {

namespace {

std::size_t bins_for(double extent, double width) {
  // Tolerate representation error in extent / width before rounding up.
  const double n = extent / width;
  return static_cast<std::size_t>(std::ceil(n - 1e-9 * std::max(1.0, n)));
}

}  // namespace

BinLayout BinLayout::uniform(double bin_width_ns, double tau_max_ns) {
  if (!(bin_width_ns > 0.0)) throw DataError("bin width must be positive");
  if (!(tau_max_ns >= bin_width_ns)) throw DataError("tau_max must be at least one bin width");
  BinLayout l;
  const std::size_t n = bins_for(2.0 * tau_max_ns, bin_width_ns);
  l.tau_max_ = 0.5 * static_cast<double>(n) * bin_width_ns;
  l.segments_.push_back({-l.tau_max_, bin_width_ns, 0, n});
  l.total_bins_ = n;
  return l;
}

BinLayout BinLayout::two_scale(double fine_width_ns, double fine_extent_ns, double coarse_width_ns,
                               double tau_max_ns) {
  if (!(fine_width_ns > 0.0) || !(coarse_width_ns > 0.0)) throw DataError("bin widths must be positive");
  if (!(fine_extent_ns >= fine_width_ns)) throw DataError("fine extent must be at least one fine bin");
  if (!(tau_max_ns > fine_extent_ns)) throw DataError("tau_max must exceed the fine extent");
  BinLayout l;
  const std::size_t n_fine = bins_for(2.0 * fine_extent_ns, fine_width_ns);
  const double fine_half = 0.5 * static_cast<double>(n_fine) * fine_width_ns;
  const std::size_t n_coarse = bins_for(tau_max_ns - fine_half, coarse_width_ns);
  const double coarse_extent = static_cast<double>(n_coarse) * coarse_width_ns;
  l.tau_max_ = fine_half + coarse_extent;
  l.segments_.push_back({-l.tau_max_, coarse_width_ns, 0, n_coarse});
  l.segments_.push_back({-fine_half, fine_width_ns, n_coarse, n_fine});
  l.segments_.push_back({fine_half, coarse_width_ns, n_coarse + n_fine, n_coarse});
  l.total_bins_ = 2 * n_coarse + n_fine;
  return l;
}

std::vector<double> BinLayout::edges() const {
  std::vector<double> e;
  e.reserve(total_bins_ + 1);
  for (const Segment& s : segments_) {
    for (std::size_t i = 0; i < s.bins; ++i) e.push_back(s.lo + static_cast<double>(i) * s.width);
  }
  e.push_back(tau_max_);
  return e;
}

std::optional<std::size_t> BinLayout::index(double dt) const {
  if (dt < -tau_max_ || dt > tau_max_) return std::nullopt;
  for (const Segment& s : segments_) {
    const double hi = s.lo + static_cast<double>(s.bins) * s.width;
    if (dt < hi || &s == &segments_.back()) {
      const auto k = static_cast<std::size_t>(std::max(0.0, std::floor((dt - s.lo) / s.width)));
      return s.first_bin + std::min(k, s.bins - 1);
    }
  }
  return std::nullopt;
}

namespace {

void sweep(const std::vector<double>& a, std::size_t begin, std::size_t end, const std::vector<double>& b,
           const BinLayout& layout, std::vector<std::uint64_t>& counts) {
  const double tau_max = layout.tau_max_ns();
  if (begin >= end) return;
  auto lo = std::lower_bound(b.begin(), b.end(), a[begin] - tau_max);
  for (std::size_t i = begin; i < end; ++i) {
    const double ta = a[i];
    while (lo != b.end() && *lo < ta - tau_max) ++lo;
    for (auto it = lo; it != b.end() && *it <= ta + tau_max; ++it) {
      if (auto k = layout.index(*it - ta)) ++counts[*k];
    }
  }
}

}  // namespace

RawHistogram count_pairs(const sim::PhotonStream& a, const sim::PhotonStream& b, const BinLayout& layout,
                         unsigned workers) {
  if (a.empty() || b.empty()) throw DataError("insufficient events: both streams need at least one timestamp");
  RawHistogram raw;
  raw.bin_edges_ns = layout.edges();
  raw.counts.assign(layout.size(), 0);

  const std::size_t n = a.size();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::size_t>(n, 256))));
  if (workers == 1) {
    sweep(a.timestamps_ns, 0, n, b.timestamps_ns, layout, raw.counts);
    return raw;
  }
  std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(layout.size(), 0));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = n * w / workers;
    const std::size_t end = n * (w + 1) / workers;
    pool.emplace_back(sweep, std::cref(a.timestamps_ns), begin, end, std::cref(b.timestamps_ns), std::cref(layout),
                      std::ref(partial[w]));
  }
  for (auto& t : pool) t.join();
  for (const auto& p : partial) {
    for (std::size_t k = 0; k < p.size(); ++k) raw.counts[k] += p[k];
  }
  return raw;
}

BlockCounts count_pairs_blocked(const sim::PhotonStream& a, const sim::PhotonStream& b, const BinLayout& layout,
                                std::size_t n_blocks, unsigned workers) {
  if (a.empty() || b.empty()) throw DataError("insufficient events: both streams need at least one timestamp");
  if (n_blocks < 2) throw DataError("block counting needs at least two blocks");
  const double duration = std::max(a.duration_ns, b.duration_ns);
  if (!(duration > 0.0)) throw DataError("duration must be positive for block counting");

  BlockCounts out;
  out.block_duration_ns = duration / static_cast<double>(n_blocks);
  out.rate_b_cps = static_cast<double>(b.size()) / duration * kNsPerSecond;
  out.blocks.resize(n_blocks);
  out.events_a.resize(n_blocks);
  std::vector<std::size_t> first(n_blocks + 1);
  for (std::size_t k = 0; k <= n_blocks; ++k) {
    const double t = k == n_blocks ? std::numeric_limits<double>::infinity()
                                   : duration * static_cast<double>(k) / static_cast<double>(n_blocks);
    first[k] = static_cast<std::size_t>(std::lower_bound(a.timestamps_ns.begin(), a.timestamps_ns.end(), t) -
                                        a.timestamps_ns.begin());
  }
  for (std::size_t k = 0; k < n_blocks; ++k) {
    out.blocks[k].bin_edges_ns = layout.edges();
    out.blocks[k].counts.assign(layout.size(), 0);
    out.events_a[k] = first[k + 1] - first[k];
  }
  auto run = [&](std::size_t from, std::size_t to) {
    for (std::size_t k = from; k < to; ++k) {
      sweep(a.timestamps_ns, first[k], first[k + 1], b.timestamps_ns, layout, out.blocks[k].counts);
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n_blocks)));
  if (workers == 1) {
    run(0, n_blocks);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, n_blocks * w / workers, n_blocks * (w + 1) / workers);
    for (auto& t : pool) t.join();
  }
  return out;
}

CorrelationHistogram BlockCounts::histogram(std::size_t skip, Normalization mode) const {
  if (blocks.empty()) throw DataError("no blocks");
  RawHistogram raw;
  raw.bin_edges_ns = blocks.front().bin_edges_ns;
  raw.counts.assign(blocks.front().counts.size(), 0);
  std::uint64_t n_a = 0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    if (k == skip) continue;
    for (std::size_t i = 0; i < raw.counts.size(); ++i) raw.counts[i] += blocks[k].counts[i];
    n_a += events_a[k];
    ++used;
  }
  const double t = block_duration_ns * static_cast<double>(used);
  if (n_a == 0) throw DataError("insufficient events in the selected blocks");
  return normalize(raw, static_cast<double>(n_a) / t * kNsPerSecond, rate_b_cps, t, mode);
}

CorrelationHistogram normalize(const RawHistogram& raw, double rate_a_cps, double rate_b_cps, double duration_ns,
                               Normalization mode) {
  if (!(duration_ns > 0.0)) throw DataError("duration must be positive for normalization");
  if (!(rate_a_cps > 0.0) || !(rate_b_cps > 0.0)) throw DataError("channel rates must be positive");
  if (raw.bin_edges_ns.size() != raw.counts.size() + 1) throw DataError("histogram edges/counts mismatch");

  CorrelationHistogram h;
  h.bin_edges_ns = raw.bin_edges_ns;
  h.counts = raw.counts;
  h.duration_ns = duration_ns;
  h.rate_a_cps = rate_a_cps;
  h.rate_b_cps = rate_b_cps;
  const std::size_t n = raw.counts.size();
  h.g2.resize(n);
  h.sigma_g2.resize(n);

  const double ra = rate_a_cps / kNsPerSecond;
  const double rb = rate_b_cps / kNsPerSecond;
  std::vector<double> scale(n);
  for (std::size_t k = 0; k < n; ++k) {
    scale[k] = 1.0 / (ra * rb * h.width(k) * duration_ns);
    h.total_pairs += raw.counts[k];
  }

  if (mode == Normalization::kPlateau) {
    const double tau_max = std::max(std::abs(h.bin_edges_ns.front()), std::abs(h.bin_edges_ns.back()));
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (std::abs(h.center(k)) > 0.8 * tau_max) {
        sum += static_cast<double>(raw.counts[k]) * scale[k];
        ++used;
      }
    }
    if (used == 0 || sum <= 0.0) throw DataError("plateau normalization needs populated wing bins");
    const double plateau = sum / static_cast<double>(used);
    for (double& s : scale) s /= plateau;
  }

  for (std::size_t k = 0; k < n; ++k) {
    const double c = static_cast<double>(raw.counts[k]);
    h.g2[k] = c * scale[k];
    h.sigma_g2[k] = scale[k] * std::sqrt(std::max(c, 1.0));
  }
  return h;
}

CorrelationHistogram correlate(const sim::PhotonStream& a, const sim::PhotonStream& b, const BinLayout& layout,
                               const CorrelateOptions& options) {
  const RawHistogram raw = count_pairs(a, b, layout, options.workers);
  const double duration = std::max(a.duration_ns, b.duration_ns);
  const double ra = static_cast<double>(a.size()) / duration * kNsPerSecond;
  const double rb = static_cast<double>(b.size()) / duration * kNsPerSecond;
  return normalize(raw, ra, rb, duration, options.normalization);
}

CorrelationHistogram correlate(const sim::PhotonStream& a, const sim::PhotonStream& b, double bin_width_ns,
                               double tau_max_ns) {
  return correlate(a, b, BinLayout::uniform(bin_width_ns, tau_max_ns));
}

}  // namespace photodyn::corr
