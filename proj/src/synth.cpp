#include "gazeshift/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gazeshift/error.hpp"

namespace gazeshift {

double SynthRng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SynthRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

double SynthRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform01();  // (0, 1]
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

void SynthParams::validate() const {
  try {
    meta.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidParams, e.what());
  }
  if (n_frames < 1) throw Error(ErrorCode::InvalidParams, "n_frames must be positive");
  if (!(smoothness > 0.0 && smoothness < 1.0)) {
    throw Error(ErrorCode::InvalidParams, "smoothness must lie in (0, 1)");
  }
  if (std::abs(lag_frames) >= n_frames) {
    throw Error(ErrorCode::InvalidParams, "|lag_frames| must be below n_frames");
  }
  if (!(jitter_sigma_px >= 0.0) || !std::isfinite(jitter_sigma_px)) {
    throw Error(ErrorCode::InvalidParams, "jitter must be non-negative");
  }
  if (!(dropout_prob >= 0.0 && dropout_prob < 1.0)) {
    throw Error(ErrorCode::InvalidParams, "dropout_prob must lie in [0, 1)");
  }
}

namespace {

// Largest coordinate still inside [0, size).
double clamp_coord(double v, int size) {
  return std::clamp(v, 0.0, std::nextafter(static_cast<double>(size), 0.0));
}

}  // namespace

GazeStream generate_actor_stream(const SynthParams& p) {
  p.validate();
  VideoMeta meta = p.meta;
  meta.n_frames = p.n_frames;
  SynthRng rng(p.seed);

  const double cx = meta.width_px / 2.0;
  const double cy = meta.height_px / 2.0;
  const double stat_x = meta.width_px / 6.0;
  const double stat_y = meta.height_px / 6.0;
  const double innovation = std::sqrt(1.0 - p.smoothness * p.smoothness);

  std::vector<GazeSample> samples;
  samples.reserve(static_cast<std::size_t>(2 * p.n_frames));
  double gx = cx + stat_x * rng.normal();
  double gy = cy + stat_y * rng.normal();
  for (std::int64_t frame = 0; frame < p.n_frames; ++frame) {
    if (frame > 0) {
      gx = cx + p.smoothness * (gx - cx) + stat_x * innovation * rng.normal();
      gy = cy + p.smoothness * (gy - cy) + stat_y * innovation * rng.normal();
    }
    for (int k = 0; k < 2; ++k) {
      GazeSample s;
      s.frame_index = frame;
      s.t_s = (static_cast<double>(frame) + 0.5 * k) / meta.fps;
      s.x_px = clamp_coord(gx + rng.uniform(-1.0, 1.0), meta.width_px);
      s.y_px = clamp_coord(gy + rng.uniform(-1.0, 1.0), meta.height_px);
      s.valid = !(rng.uniform01() < p.dropout_prob);
      samples.push_back(s);
    }
  }
  return GazeStream(meta, std::move(samples), "actor");
}

GazeStream derive_viewer_stream(const GazeStream& actor, std::int64_t lag_frames,
                                double jitter_sigma_px, std::uint64_t seed) {
  const std::int64_t n = actor.frame_count();
  if (std::abs(lag_frames) >= n) {
    throw Error(ErrorCode::LagTooLarge, "|lag| must be below the actor frame count");
  }
  if (!(jitter_sigma_px >= 0.0) || !std::isfinite(jitter_sigma_px)) {
    throw Error(ErrorCode::InvalidParams, "jitter must be non-negative");
  }
  const VideoMeta& meta = actor.meta();
  const double shift_s = static_cast<double>(lag_frames) / meta.fps;
  SynthRng rng(seed);
  std::vector<GazeSample> samples;
  samples.reserve(actor.samples().size());
  for (std::int64_t t = 0; t < n; ++t) {
    const std::int64_t source = t - lag_frames;
    if (source < 0 || source >= n) continue;
    const auto [first, last] = actor.frame_range(source, source);
    for (auto i = first; i < last; ++i) {
      GazeSample s = actor.samples()[i];
      s.frame_index = t;
      s.t_s += shift_s;
      s.x_px = clamp_coord(s.x_px + jitter_sigma_px * rng.normal(), meta.width_px);
      s.y_px = clamp_coord(s.y_px + jitter_sigma_px * rng.normal(), meta.height_px);
      samples.push_back(s);
    }
  }
  VideoMeta viewer_meta = meta;
  viewer_meta.n_frames = n;
  return GazeStream(viewer_meta, std::move(samples), "viewer");
}

std::uint64_t viewer_seed(std::uint64_t seed) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SyntheticPair generate_pair(const SynthParams& p) {
  GazeStream actor = generate_actor_stream(p);
  GazeStream viewer = derive_viewer_stream(actor, p.lag_frames, p.jitter_sigma_px,
                                           viewer_seed(p.seed));
  return {std::move(actor), std::move(viewer), p.lag_frames};
}

}  // namespace gazeshift
