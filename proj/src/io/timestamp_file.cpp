#include "photodyn/io/timestamp_file.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>

#include "photodyn/error.hpp"

namespace photodyn::io {

namespace {

constexpr char kMagic[4] = {'P', 'H', 'D', 'N'};

void put_le(std::vector<char>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint64_t get_le(const char* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

void check_order(const std::vector<std::uint64_t>& ts, const std::string& source) {
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (ts[i] < ts[i - 1]) {
      throw DataError(source + ": timestamps decrease at record " + std::to_string(i + 1));
    }
  }
}

}  // namespace

std::vector<char> encode_timestamps(sim::Channel channel, const std::vector<std::uint64_t>& ts) {
  std::vector<char> out;
  out.reserve(kTimestampHeaderSize + 8 * ts.size());
  for (char ch : kMagic) out.push_back(ch);
  put_le(out, kTimestampVersion, 2);
  put_le(out, static_cast<std::uint8_t>(channel), 1);
  put_le(out, 0, 8);
  put_le(out, 0, 1);
  for (auto t : ts) put_le(out, t, 8);
  return out;
}

TimestampData decode_timestamps(const std::vector<char>& bytes, const std::string& source) {
  if (bytes.size() < kTimestampHeaderSize || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw DataError(source + ": not a timestamp file (bad magic)");
  }
  const auto version = get_le(bytes.data() + 4, 2);
  if (version != kTimestampVersion) throw DataError(source + ": unsupported version " + std::to_string(version));
  const auto channel = get_le(bytes.data() + 6, 1);
  if (channel > 1) throw DataError(source + ": invalid channel " + std::to_string(channel));
  for (std::size_t i = 7; i < kTimestampHeaderSize; ++i) {
    if (bytes[i] != 0) throw DataError(source + ": reserved header bytes must be zero");
  }
  const std::size_t payload = bytes.size() - kTimestampHeaderSize;
  if (payload % 8 != 0) throw DataError(source + ": truncated record at end of file");
  TimestampData d;
  d.channel = static_cast<sim::Channel>(channel);
  d.timestamps_ps.resize(payload / 8);
  for (std::size_t i = 0; i < d.timestamps_ps.size(); ++i) {
    d.timestamps_ps[i] = get_le(bytes.data() + kTimestampHeaderSize + 8 * i, 8);
  }
  check_order(d.timestamps_ps, source);
  return d;
}

TimestampData parse_text_timestamps(const std::string& text, sim::Channel channel, const std::string& source) {
  TimestampData d;
  d.channel = channel;
  d.text = true;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string_view line(text.data() + pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    double ns = 0.0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), ns);
    if (ec != std::errc() || ptr != line.data() + line.size() || !std::isfinite(ns) || ns < 0.0) {
      throw DataError(source + ":" + std::to_string(line_no) + ": expected a non-negative timestamp in ns, got '" +
                      std::string(line) + "'");
    }
    d.timestamps_ps.push_back(static_cast<std::uint64_t>(std::llround(ns * 1e3)));
  }
  check_order(d.timestamps_ps, source);
  return d;
}

std::vector<std::uint64_t> to_picoseconds(const std::vector<double>& ns) {
  std::vector<std::uint64_t> out(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(ns[i] >= 0.0)) throw DataError("negative timestamp");
    out[i] = static_cast<std::uint64_t>(std::llround(ns[i] * 1e3));
  }
  return out;
}

std::vector<char> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  return std::vector<char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

void write_timestamp_file(const std::filesystem::path& path, const sim::PhotonStream& stream) {
  const auto bytes = encode_timestamps(stream.channel, to_picoseconds(stream.timestamps_ns));
  write_file_bytes(path, std::string(bytes.begin(), bytes.end()));
}

TimestampData read_timestamp_file(const std::filesystem::path& path, sim::Channel text_channel) {
  const auto bytes = read_file_bytes(path);
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0) return decode_timestamps(bytes, path.string());
  return parse_text_timestamps(std::string(bytes.begin(), bytes.end()), text_channel, path.string());
}

sim::PhotonStream to_stream(const TimestampData& data, double duration_ns) {
  sim::PhotonStream s;
  s.channel = data.channel;
  s.timestamps_ns.reserve(data.timestamps_ps.size());
  for (auto t : data.timestamps_ps) s.timestamps_ns.push_back(static_cast<double>(t) * 1e-3);
  // Repeated picosecond values cannot occur in a physical stream; they stay
  // as recorded.
  if (duration_ns > 0.0) {
    if (!s.timestamps_ns.empty() && s.timestamps_ns.back() > duration_ns) {
      throw DataError("timestamps extend beyond the stated acquisition time");
    }
    s.duration_ns = duration_ns;
  } else {
    s.duration_ns = s.timestamps_ns.empty() ? 0.0 : s.timestamps_ns.back();
  }
  return s;
}

}  // namespace photodyn::io
