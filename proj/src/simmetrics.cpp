#include "gazeshift/simmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gazeshift/ranks.hpp"

namespace gazeshift {

const char* to_string(MetricKind kind) noexcept {
  switch (kind) {
    case MetricKind::NSS: return "nss";
    case MetricKind::AUC_POINTS: return "auc-points";
    case MetricKind::AUC_MAPS: return "auc-maps";
    case MetricKind::PCC: return "pcc";
  }
  return "unknown";
}

MetricKind parse_metric(std::string_view name) {
  if (name == "nss") return MetricKind::NSS;
  if (name == "auc-points") return MetricKind::AUC_POINTS;
  if (name == "auc-maps" || name == "auc") return MetricKind::AUC_MAPS;
  if (name == "pcc") return MetricKind::PCC;
  throw Error(ErrorCode::InvalidArgument, "unknown metric '" + std::string(name) + "'");
}

namespace {

void require_nonconstant(const Eigen::ArrayXd& pixels) {
  if (pixels.size() == 0 || pixels.maxCoeff() == pixels.minCoeff()) {
    throw Error(ErrorCode::DegenerateMap, "map has zero variance");
  }
}

}  // namespace

CenteredMap center_pixels(ImageSize size, Eigen::ArrayXd pixels) {
  require_nonconstant(pixels);
  CenteredMap c{size, std::move(pixels), 0.0};
  c.centered -= c.centered.mean();
  c.norm = std::sqrt(c.centered.square().sum());
  return c;
}

MetricScore pcc(const CenteredMap& a, const CenteredMap& b) {
  require_same_size(a.size, b.size);
  const double r = (a.centered * b.centered).sum() / (a.norm * b.norm);
  return {MetricKind::PCC, std::clamp(r, -1.0, 1.0), a.size.pixels()};
}

MapMoments pixel_moments(ImageSize size, const Eigen::ArrayXd& pixels) {
  require_nonconstant(pixels);
  const double mean = pixels.mean();
  const double var = (pixels - mean).square().mean();
  return {size, mean, std::sqrt(var)};
}

MetricScore auc_points(const Eigen::ArrayXd& pixels, const SortedPixels& sorted,
                       const Eigen::Ref<const Points>& fixations) {
  const auto n_fix = fixations.cols();
  if (n_fix == 0) throw Error(ErrorCode::NoPoints, "no fixations");
  const ImageSize size = sorted.size;

  std::vector<Eigen::Index> fixated(static_cast<std::size_t>(n_fix));
  std::vector<double> positives(static_cast<std::size_t>(n_fix));
  for (Eigen::Index i = 0; i < n_fix; ++i) {
    check_point(size, fixations(0, i), fixations(1, i));
    const Eigen::Index idx = Eigen::Index(pixel_index(fixations(1, i), size.height)) * size.width +
                             pixel_index(fixations(0, i), size.width);
    fixated[i] = idx;
    positives[i] = pixels(idx);
  }
  std::sort(fixated.begin(), fixated.end());
  fixated.erase(std::unique(fixated.begin(), fixated.end()), fixated.end());

  const auto n_neg = static_cast<std::int64_t>(sorted.values.size() - fixated.size());
  if (n_neg == 0) throw Error(ErrorCode::AllPixelsPositive, "fixations cover every pixel");

  // values of the distinct fixated pixels; removed from the all-pixel counts
  std::vector<double> fixated_values;
  fixated_values.reserve(fixated.size());
  for (const auto idx : fixated) fixated_values.push_back(pixels(idx));
  std::sort(fixated_values.begin(), fixated_values.end());

  auto count_below_and_equal = [](const std::vector<double>& v, double x) {
    const auto lo = std::lower_bound(v.begin(), v.end(), x);
    const auto hi = std::upper_bound(lo, v.end(), x);
    return std::pair<std::int64_t, std::int64_t>(lo - v.begin(), hi - lo);
  };

  // twice the Mann-Whitney U, kept integral so the sum is exact
  std::int64_t twice_u = 0;
  for (const double v : positives) {
    const auto [all_below, all_equal] = count_below_and_equal(sorted.values, v);
    const auto [fix_below, fix_equal] = count_below_and_equal(fixated_values, v);
    twice_u += 2 * (all_below - fix_below) + (all_equal - fix_equal);
  }
  const double u = 0.5 * static_cast<double>(twice_u);
  return {MetricKind::AUC_POINTS, u / (static_cast<double>(n_fix) * static_cast<double>(n_neg)),
          n_fix};
}

CandidateRanks rank_pixels(ImageSize size, const Eigen::ArrayXd& pixels) {
  return {size, rank_with_midranks(std::span<const double>(pixels.data(), pixels.size())).midranks};
}

ReferenceLabels label_pixels(ImageSize size, const Eigen::ArrayXd& pixels, double top_frac) {
  if (!(top_frac > 0.0 && top_frac < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "top_frac must lie in (0, 1)");
  }
  require_nonconstant(pixels);
  const auto n = static_cast<std::int64_t>(pixels.size());
  // nearest-rank quantile: the ceil(p * n)-th smallest value
  auto rank = static_cast<std::int64_t>(std::ceil((1.0 - top_frac) * static_cast<double>(n) - 1e-9));
  rank = std::clamp<std::int64_t>(rank, 1, n);
  std::vector<double> scratch(pixels.data(), pixels.data() + n);
  std::nth_element(scratch.begin(), scratch.begin() + (rank - 1), scratch.end());
  const double threshold = scratch[static_cast<std::size_t>(rank - 1)];
  const double min = pixels.minCoeff();

  ReferenceLabels labels{size, std::vector<unsigned char>(static_cast<std::size_t>(n), 0), 0,
                         threshold};
  const bool strict = threshold == min;
  for (std::int64_t i = 0; i < n; ++i) {
    const bool pos = strict ? pixels(i) > threshold : pixels(i) >= threshold;
    labels.positive[static_cast<std::size_t>(i)] = pos ? 1 : 0;
    labels.n_positive += pos ? 1 : 0;
  }
  if (labels.n_positive == 0 || labels.n_positive == n) {
    throw Error(ErrorCode::DegenerateMap, "reference labeling has a single class");
  }
  return labels;
}

MetricScore auc_maps(const CandidateRanks& candidate, const ReferenceLabels& reference) {
  require_same_size(candidate.size, reference.size);
  double rank_sum = 0.0;
  const auto n = candidate.midranks.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (reference.positive[i]) rank_sum += candidate.midranks[i];
  }
  const auto p = static_cast<double>(reference.n_positive);
  const auto q = static_cast<double>(n) - p;
  const double u = rank_sum - p * (p + 1.0) / 2.0;
  return {MetricKind::AUC_MAPS, u / (p * q), static_cast<std::int64_t>(n)};
}

}  // namespace gazeshift
