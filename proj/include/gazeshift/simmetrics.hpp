#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "gazeshift/error.hpp"
#include "gazeshift/fixmap.hpp"

namespace gazeshift {

enum class MetricKind { NSS, AUC_POINTS, AUC_MAPS, PCC };

const char* to_string(MetricKind kind) noexcept;
/// Accepts the CLI spellings nss, auc-points, auc-maps, pcc.
MetricKind parse_metric(std::string_view name);

struct MetricScore {
  MetricKind kind = MetricKind::PCC;
  double value = 0.0;
  std::int64_t n_support = 0;
};

/// Pixel values flattened in row-major order, as doubles.
template <typename Scalar>
Eigen::ArrayXd flatten(const SaliencyMap<Scalar>& map) {
  return map.values().template cast<double>().template reshaped<Eigen::RowMajor>().array();
}

inline void require_same_size(ImageSize a, ImageSize b) {
  if (!(a == b)) throw Error(ErrorCode::DimensionMismatch, "maps differ in size");
}

// ---------------------------------------------------------------------------
// PCC

/// Mean-removed pixels plus their Euclidean norm.
struct CenteredMap {
  ImageSize size;
  Eigen::ArrayXd centered;
  double norm = 0.0;
};

CenteredMap center_pixels(ImageSize size, Eigen::ArrayXd pixels);

/// Throws DegenerateMap when the map is constant.
template <typename Scalar>
CenteredMap center_map(const SaliencyMap<Scalar>& map) {
  return center_pixels(map.size(), flatten(map));
}

MetricScore pcc(const CenteredMap& a, const CenteredMap& b);

/// Pearson correlation over all pixels (population statistics).
template <typename Scalar>
MetricScore pcc(const SaliencyMap<Scalar>& a, const SaliencyMap<Scalar>& b) {
  require_same_size(a.size(), b.size());
  return pcc(center_map(a), center_map(b));
}

// ---------------------------------------------------------------------------
// NSS

struct MapMoments {
  ImageSize size;
  double mean = 0.0;
  double stddev = 0.0;  ///< population
};

MapMoments pixel_moments(ImageSize size, const Eigen::ArrayXd& pixels);

template <typename Scalar>
MapMoments moments(const SaliencyMap<Scalar>& map) {
  return pixel_moments(map.size(), flatten(map));
}

/// (map - mean) / std, pixel-wise.
template <typename Scalar>
Eigen::MatrixXd zscore(const SaliencyMap<Scalar>& map) {
  const MapMoments m = moments(map);
  return ((map.values().template cast<double>().array() - m.mean) / m.stddev).matrix();
}

/// Mean z-score at the fixated pixels; `moments` must describe `map`.
template <typename Scalar>
MetricScore nss(const SaliencyMap<Scalar>& map, const MapMoments& m,
                const Eigen::Ref<const Points>& fixations) {
  if (fixations.cols() == 0) throw Error(ErrorCode::NoPoints, "no fixations");
  const ImageSize size = map.size();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < fixations.cols(); ++i) {
    check_point(size, fixations(0, i), fixations(1, i));
    const int px = pixel_index(fixations(0, i), size.width);
    const int py = pixel_index(fixations(1, i), size.height);
    sum += (static_cast<double>(map(py, px)) - m.mean) / m.stddev;
  }
  return {MetricKind::NSS, sum / static_cast<double>(fixations.cols()), fixations.cols()};
}

template <typename Scalar>
MetricScore nss(const SaliencyMap<Scalar>& map, const Eigen::Ref<const Points>& fixations) {
  if (fixations.cols() == 0) throw Error(ErrorCode::NoPoints, "no fixations");
  return nss(map, moments(map), fixations);
}

// ---------------------------------------------------------------------------
// AUC with fixations as positives

/// All pixel values in ascending order; reusable across fixation sets on one map.
struct SortedPixels {
  ImageSize size;
  std::vector<double> values;
};

template <typename Scalar>
SortedPixels sort_pixels(const SaliencyMap<Scalar>& map) {
  const Eigen::ArrayXd flat = flatten(map);
  SortedPixels s{map.size(), std::vector<double>(flat.data(), flat.data() + flat.size())};
  std::sort(s.values.begin(), s.values.end());
  return s;
}

/// Positives are the map values at the fixations (with multiplicity); negatives
/// are the values of every pixel that received no fixation. Mann-Whitney U with
/// ties counted one half, divided by P * N.
MetricScore auc_points(const Eigen::ArrayXd& pixels, const SortedPixels& sorted,
                       const Eigen::Ref<const Points>& fixations);

template <typename Scalar>
MetricScore auc_points(const SaliencyMap<Scalar>& map, const SortedPixels& sorted,
                       const Eigen::Ref<const Points>& fixations) {
  return auc_points(flatten(map), sorted, fixations);
}

template <typename Scalar>
MetricScore auc_points(const SaliencyMap<Scalar>& map, const Eigen::Ref<const Points>& fixations) {
  return auc_points(flatten(map), sort_pixels(map), fixations);
}

// ---------------------------------------------------------------------------
// AUC of one map against another map's top quantile

/// Midranks of a candidate map's pixels.
struct CandidateRanks {
  ImageSize size;
  std::vector<double> midranks;
};

CandidateRanks rank_pixels(ImageSize size, const Eigen::ArrayXd& pixels);

template <typename Scalar>
CandidateRanks rank_candidate(const SaliencyMap<Scalar>& map) {
  return rank_pixels(map.size(), flatten(map));
}

/// Binary labeling of a reference map: pixels at or above the nearest-rank
/// (1 - top_frac) quantile are positive. When that quantile equals the map
/// minimum, positives are the pixels strictly above the minimum instead.
struct ReferenceLabels {
  ImageSize size;
  std::vector<unsigned char> positive;
  std::int64_t n_positive = 0;
  double threshold = 0.0;
};

ReferenceLabels label_pixels(ImageSize size, const Eigen::ArrayXd& pixels, double top_frac);

template <typename Scalar>
ReferenceLabels label_reference(const SaliencyMap<Scalar>& map, double top_frac) {
  return label_pixels(map.size(), flatten(map), top_frac);
}

/// Rank-sum AUC: (sum of positive midranks - P(P+1)/2) / (P * N).
MetricScore auc_maps(const CandidateRanks& candidate, const ReferenceLabels& reference);

template <typename Scalar>
MetricScore auc_maps(const SaliencyMap<Scalar>& candidate, const SaliencyMap<Scalar>& reference,
                     double top_frac) {
  require_same_size(candidate.size(), reference.size());
  return auc_maps(rank_candidate(candidate), label_reference(reference, top_frac));
}

}  // namespace gazeshift
