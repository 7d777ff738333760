#pragma once

#include <cstdint>
#include <random>

#include "gazeshift/gaze_io.hpp"

namespace gazeshift {

/// Deterministic random source: std::mt19937_64 (bit-exact by the standard),
/// uniforms from the top 53 bits, normals by Box-Muller. Unlike the standard
/// distributions, the output is identical on every platform.
class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed) : engine_(seed) {}

  double uniform01();                  ///< [0, 1)
  double uniform(double lo, double hi);
  double normal();                     ///< standard normal

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct SynthParams {
  std::uint64_t seed = 42;
  std::int64_t n_frames = 300;
  VideoMeta meta{160, 120, 15.0, 0};
  double smoothness = 0.9;  ///< AR(1) coefficient, in (0, 1)
  std::int64_t lag_frames = 10;
  double jitter_sigma_px = 10.0;
  double dropout_prob = 0.0;  ///< in [0, 1)

  /// Throws InvalidParams.
  void validate() const;
};

/// AR(1) gaze trajectory around the image center with stationary std of
/// width/6 and height/6, two samples per frame (+-1 px uniform offsets),
/// each sample dropped with probability dropout_prob.
GazeStream generate_actor_stream(const SynthParams& p);

/// Viewer frame t copies actor frame t - lag_frames with independent Gaussian
/// jitter per axis, clamped to the image. Frames without a source stay empty.
GazeStream derive_viewer_stream(const GazeStream& actor, std::int64_t lag_frames,
                                double jitter_sigma_px, std::uint64_t seed);

struct SyntheticPair {
  GazeStream actor;
  GazeStream viewer;
  std::int64_t lag_frames = 0;
};

/// Actor from p.seed, viewer from a seed derived from p.seed.
SyntheticPair generate_pair(const SynthParams& p);

std::uint64_t viewer_seed(std::uint64_t seed);

}  // namespace gazeshift
