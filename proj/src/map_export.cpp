#include "gazeshift/map_export.hpp"

#include <cmath>

#include "gazeshift/error.hpp"
#include "gazeshift/format.hpp"

namespace gazeshift {

std::string encode_pgm16(const SaliencyMapd& map) {
  const auto& v = map.values();
  const double max = v.size() > 0 ? v.maxCoeff() : 0.0;
  std::string out = "P5\n" + std::to_string(map.width()) + " " + std::to_string(map.height()) +
                    "\n65535\n";
  out.reserve(out.size() + 2 * static_cast<std::size_t>(v.size()));
  for (Eigen::Index y = 0; y < v.rows(); ++y) {
    for (Eigen::Index x = 0; x < v.cols(); ++x) {
      long scaled = 0;
      if (max > 0.0) scaled = std::lround(std::clamp(v(y, x) / max, 0.0, 1.0) * 65535.0);
      out.push_back(static_cast<char>((scaled >> 8) & 0xff));
      out.push_back(static_cast<char>(scaled & 0xff));
    }
  }
  return out;
}

namespace {

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string_view next_token(std::string_view bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    const char c = bytes[pos];
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++pos;
    } else {
      break;
    }
  }
  const auto start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  return bytes.substr(start, pos - start);
}

}  // namespace

Pgm16 decode_pgm16(std::string_view bytes) {
  std::size_t pos = 0;
  if (next_token(bytes, pos) != "P5") throw Error(ErrorCode::Io, "not a binary PGM");
  long long w = 0;
  long long h = 0;
  long long maxval = 0;
  if (!parse_int64(next_token(bytes, pos), w) || !parse_int64(next_token(bytes, pos), h) ||
      !parse_int64(next_token(bytes, pos), maxval) || w < 1 || h < 1) {
    throw Error(ErrorCode::Io, "bad PGM header");
  }
  if (maxval != 65535) throw Error(ErrorCode::Io, "expected a 16-bit PGM");
  ++pos;  // single whitespace before the raster
  const auto n = static_cast<std::size_t>(w * h);
  if (bytes.size() < pos + 2 * n) throw Error(ErrorCode::Io, "truncated PGM raster");
  Pgm16 pgm{static_cast<int>(w), static_cast<int>(h), std::vector<std::uint16_t>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto hi = static_cast<unsigned char>(bytes[pos + 2 * i]);
    const auto lo = static_cast<unsigned char>(bytes[pos + 2 * i + 1]);
    pgm.pixels[i] = static_cast<std::uint16_t>((hi << 8) | lo);
  }
  return pgm;
}

std::string encode_map_csv(const SaliencyMapd& map) {
  const auto& v = map.values();
  std::string out;
  for (Eigen::Index y = 0; y < v.rows(); ++y) {
    for (Eigen::Index x = 0; x < v.cols(); ++x) {
      if (x > 0) out += ',';
      out += format_roundtrip(v(y, x));
    }
    out += '\n';
  }
  return out;
}

SaliencyMapd decode_map_csv(std::string_view text) {
  std::vector<double> values;
  Eigen::Index cols = -1;
  Eigen::Index rows = 0;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    Eigen::Index n = 0;
    std::size_t fstart = 0;
    while (true) {
      const auto comma = line.find(',', fstart);
      const auto field = line.substr(fstart, comma == std::string_view::npos
                                                 ? std::string_view::npos
                                                 : comma - fstart);
      double value = 0.0;
      if (!parse_double(field, value)) throw MalformedRowError(line_no, "bad map value");
      values.push_back(value);
      ++n;
      if (comma == std::string_view::npos) break;
      fstart = comma + 1;
    }
    if (cols >= 0 && n != cols) throw MalformedRowError(line_no, "ragged map row");
    cols = n;
    ++rows;
  }
  if (rows == 0) throw Error(ErrorCode::EmptyLog, "empty map file");
  SaliencyMapd::Grid grid =
      Eigen::Map<const SaliencyMapd::Grid>(values.data(), rows, cols);
  const bool normalized = std::abs(grid.sum() - 1.0) <= 1e-9;
  return SaliencyMapd(std::move(grid), normalized);
}

}  // namespace gazeshift
