#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>

#include <Eigen/Core>

#include "gazeshift/error.hpp"
#include "gazeshift/gaze_io.hpp"

namespace gazeshift {

struct ImageSize {
  int width = 0;
  int height = 0;

  static ImageSize of(const VideoMeta& meta) { return {meta.width_px, meta.height_px}; }
  Eigen::Index pixels() const { return Eigen::Index(width) * height; }
  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

/// Dense 2-D field over the image grid, stored row-major as (y, x).
template <typename Scalar = double>
class SaliencyMap {
 public:
  using Grid = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  SaliencyMap() = default;
  explicit SaliencyMap(ImageSize size) : values_(Grid::Zero(size.height, size.width)) {}
  explicit SaliencyMap(Grid values, bool normalized = false)
      : values_(std::move(values)), normalized_(normalized) {}

  int width() const { return static_cast<int>(values_.cols()); }
  int height() const { return static_cast<int>(values_.rows()); }
  ImageSize size() const { return {width(), height()}; }
  bool normalized() const { return normalized_; }

  const Grid& values() const { return values_; }
  Grid& values() { return values_; }
  Scalar operator()(int y, int x) const { return values_(y, x); }

  /// Divides by the total mass. No-op on an all-zero map.
  void normalize() {
    const Scalar total = values_.sum();
    if (total > Scalar(0)) {
      values_ /= total;
      normalized_ = true;
    }
  }

  friend bool operator==(const SaliencyMap& a, const SaliencyMap& b) {
    return a.size() == b.size() && a.normalized_ == b.normalized_ && a.values_ == b.values_;
  }

 private:
  Grid values_;
  bool normalized_ = false;
};

using SaliencyMapd = SaliencyMap<double>;

struct KernelParams {
  double sigma_px = 25.0;
  int truncate_radius_px = 75;

  /// Radius defaults to ceil(3 sigma).
  static KernelParams from_sigma(double sigma_px) {
    KernelParams p;
    p.sigma_px = sigma_px;
    p.truncate_radius_px = static_cast<int>(std::ceil(3.0 * sigma_px));
    p.validate();
    return p;
  }

  void validate() const {
    if (!std::isfinite(sigma_px) || sigma_px <= 0.0) {
      throw Error(ErrorCode::InvalidKernel, "sigma must be positive");
    }
    if (truncate_radius_px < 1) throw Error(ErrorCode::InvalidKernel, "radius must be >= 1");
  }
};

/// Nearest pixel by round-half-away-from-zero, clamped into [0, size).
inline int pixel_index(double coord, int size) {
  const double r = std::round(coord);
  if (r < 0.0) return 0;
  if (r >= size) return size - 1;
  return static_cast<int>(r);
}

inline void check_point(ImageSize size, double x, double y) {
  if (!(std::isfinite(x) && std::isfinite(y) && x >= 0.0 && y >= 0.0 && x < size.width &&
        y < size.height)) {
    throw Error(ErrorCode::PointOutOfBounds, "point outside the image");
  }
}

/// Adds exp(-r^2 / 2 sigma^2) over the square footprint of half-width
/// truncate_radius centered on the nearest pixel; mass off the image is dropped.
template <typename Derived>
void add_splat(Eigen::MatrixBase<Derived>& grid, double x, double y, const KernelParams& params) {
  using Scalar = typename Derived::Scalar;
  const int width = static_cast<int>(grid.cols());
  const int height = static_cast<int>(grid.rows());
  const int cx = static_cast<int>(std::round(x));
  const int cy = static_cast<int>(std::round(y));
  const int r = params.truncate_radius_px;
  const double inv_two_var = 1.0 / (2.0 * params.sigma_px * params.sigma_px);
  const int y0 = std::max(0, cy - r);
  const int y1 = std::min(height - 1, cy + r);
  const int x0 = std::max(0, cx - r);
  const int x1 = std::min(width - 1, cx + r);
  for (int py = y0; py <= y1; ++py) {
    const double dy = py - y;
    for (int px = x0; px <= x1; ++px) {
      const double dx = px - x;
      grid(py, px) += static_cast<Scalar>(std::exp(-(dx * dx + dy * dy) * inv_two_var));
    }
  }
}

/// Single unnormalized Gaussian; peak 1 at an integer-valued center.
template <typename Scalar = double>
SaliencyMap<Scalar> splat_gaussian(ImageSize size, double x, double y, const KernelParams& params) {
  params.validate();
  check_point(size, x, y);
  SaliencyMap<Scalar> map(size);
  add_splat(map.values(), x, y, params);
  return map;
}

/// Pixel-wise sum of one splat per point, in point order, then normalized to unit mass.
template <typename Scalar = double>
SaliencyMap<Scalar> build_fixation_map(const Eigen::Ref<const Points>& points, ImageSize size,
                                       const KernelParams& params) {
  params.validate();
  if (points.cols() == 0) throw Error(ErrorCode::NoPoints, "no gaze points");
  for (Eigen::Index i = 0; i < points.cols(); ++i) check_point(size, points(0, i), points(1, i));
  SaliencyMap<Scalar> map(size);
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    add_splat(map.values(), points(0, i), points(1, i), params);
  }
  map.normalize();
  return map;
}

/// Map of the valid samples within +-window frames; std::nullopt means no gaze.
template <typename Scalar = double>
std::optional<SaliencyMap<Scalar>> map_for_frame(const GazeStream& stream, std::int64_t frame,
                                                 std::int64_t window, const KernelParams& params) {
  const Points points = samples_for_frame(stream, frame, window);
  if (points.cols() == 0) return std::nullopt;
  return build_fixation_map<Scalar>(points, ImageSize::of(stream.meta()), params);
}

}  // namespace gazeshift
