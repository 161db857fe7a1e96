#ifndef PHOTODYN_IO_TIMESTAMP_FILE_HPP
#define PHOTODYN_IO_TIMESTAMP_FILE_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "photodyn/sim/detector.hpp"

namespace photodyn::io {

// Binary layout, little endian:
//   0  char[4]  "PHDN"
//   4  u16      version (1)
//   6  u8       channel (0 = A, 1 = B)
//   7  u8[9]    reserved, zero
//   16 u64[]    timestamps in picoseconds
inline constexpr std::uint16_t kTimestampVersion = 1;
inline constexpr std::size_t kTimestampHeaderSize = 16;

struct TimestampData {
  sim::Channel channel = sim::Channel::A;
  std::vector<std::uint64_t> timestamps_ps;
  bool text = false;  // read from the one-column text variant
};

std::vector<char> encode_timestamps(sim::Channel channel, const std::vector<std::uint64_t>& timestamps_ps);
TimestampData decode_timestamps(const std::vector<char>& bytes, const std::string& source = "<timestamps>");

// Text variant: one timestamp in ns per line, '#' comments, blank lines
// ignored. Channel comes from `channel`.
TimestampData parse_text_timestamps(const std::string& text, sim::Channel channel,
                                    const std::string& source = "<timestamps>");

std::vector<std::uint64_t> to_picoseconds(const std::vector<double>& timestamps_ns);

void write_timestamp_file(const std::filesystem::path& path, const sim::PhotonStream& stream);
// Detects the binary variant by its magic, otherwise parses text.
// `text_channel` applies only to text files.
TimestampData read_timestamp_file(const std::filesystem::path& path, sim::Channel text_channel = sim::Channel::A);

// Converts to the in-memory stream. duration_ns <= 0 uses the last
// timestamp.
sim::PhotonStream to_stream(const TimestampData& data, double duration_ns);

std::vector<char> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::string& bytes);

}  // namespace photodyn::io

#endif  // PHOTODYN_IO_TIMESTAMP_FILE_HPP
