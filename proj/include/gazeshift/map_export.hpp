#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gazeshift/fixmap.hpp"

namespace gazeshift {

/// Binary PGM (P5, maxval 65535, big-endian samples) scaled so the map max is 65535.
/// An all-zero map exports as all zeros.
std::string encode_pgm16(const SaliencyMapd& map);

struct Pgm16 {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> pixels;  ///< row-major
};

Pgm16 decode_pgm16(std::string_view bytes);

/// Lossless text export: one line per image row, comma separated, shortest
/// round-trip decimal form of every double.
std::string encode_map_csv(const SaliencyMapd& map);

/// Inverse of encode_map_csv. The result is flagged normalized when it sums to 1 within 1e-9.
SaliencyMapd decode_map_csv(std::string_view text);

}  // namespace gazeshift
