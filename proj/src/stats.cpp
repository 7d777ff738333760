#include "gazeshift/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gazeshift/error.hpp"
#include "gazeshift/ranks.hpp"

namespace gazeshift {

const char* to_string(Alternative alt) noexcept {
  switch (alt) {
    case Alternative::TwoSided: return "two-sided";
    case Alternative::Greater: return "greater";
    case Alternative::Less: return "less";
  }
  return "unknown";
}

const char* to_string(WilcoxonMethod method) noexcept {
  return method == WilcoxonMethod::Exact ? "exact" : "normal_approx";
}

Alternative parse_alternative(std::string_view name) {
  if (name == "two-sided") return Alternative::TwoSided;
  if (name == "greater") return Alternative::Greater;
  if (name == "less") return Alternative::Less;
  throw Error(ErrorCode::InvalidArgument, "unknown alternative '" + std::string(name) + "'");
}

namespace {

// Number of subsets of {1..n} with each possible rank sum.
std::vector<std::uint64_t> subset_sum_counts(int n) {
  const int total = n * (n + 1) / 2;
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(total) + 1, 0);
  counts[0] = 1;
  int reach = 0;
  for (int rank = 1; rank <= n; ++rank) {
    reach += rank;
    for (int s = reach; s >= rank; --s) counts[s] += counts[s - rank];
  }
  return counts;
}

double upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

double exact_signed_rank_cdf(double w, int n) {
  if (n < 1 || n > kExactSignedRankMaxN) {
    throw Error(ErrorCode::NOutOfRange, "exact distribution needs 1 <= n <= 20");
  }
  const int total = n * (n + 1) / 2;
  if (w < 0.0) return 0.0;
  if (w >= total) return 1.0;
  const auto counts = subset_sum_counts(n);
  const int upto = static_cast<int>(std::floor(w));
  std::uint64_t below = 0;
  for (int s = 0; s <= upto; ++s) below += counts[s];
  return static_cast<double>(below) / std::ldexp(1.0, n);
}

double signed_rank_exact_p(double w_plus, int n, Alternative alt) {
  const double total = n * (n + 1) / 2.0;
  // W+ is symmetric about total / 2, so P(W+ >= w) = P(W+ <= total - w)
  const double lower = exact_signed_rank_cdf(w_plus, n);
  const double upper = exact_signed_rank_cdf(total - w_plus, n);
  switch (alt) {
    case Alternative::Greater: return upper;
    case Alternative::Less: return lower;
    case Alternative::TwoSided: return std::min(1.0, 2.0 * std::min(lower, upper));
  }
  return 1.0;
}

double signed_rank_normal_p(double w_plus, int n, double tie_term, Alternative alt) {
  const double nn = n;
  const double mean = nn * (nn + 1.0) / 4.0;
  const double var = (nn * (nn + 1.0) * (2.0 * nn + 1.0) - tie_term / 2.0) / 24.0;
  if (!(var > 0.0)) return 1.0;
  const double sd = std::sqrt(var);
  double p = 1.0;
  switch (alt) {
    case Alternative::Greater: p = upper_tail((w_plus - mean - 0.5) / sd); break;
    case Alternative::Less: p = upper_tail(-(w_plus - mean + 0.5) / sd); break;
    case Alternative::TwoSided: p = 2.0 * upper_tail((std::abs(w_plus - mean) - 0.5) / sd); break;
  }
  return std::clamp(p, 0.0, 1.0);
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y,
                                    Alternative alt) {
  if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "x and y differ in length");
  if (x.empty()) throw Error(ErrorCode::LengthMismatch, "need at least one pair");
  std::vector<double> diffs;
  diffs.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (d != 0.0) diffs.push_back(d);
  }
  if (diffs.empty()) throw Error(ErrorCode::AllZeroDifferences, "every difference is zero");

  std::vector<double> magnitudes(diffs.size());
  std::transform(diffs.begin(), diffs.end(), magnitudes.begin(),
                 [](double d) { return std::abs(d); });
  const Ranking ranking = rank_with_midranks(magnitudes);

  WilcoxonResult result;
  result.alternative = alt;
  result.n_effective = static_cast<int>(diffs.size());
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if (diffs[i] > 0.0) result.w_plus += ranking.midranks[i];
  }
  if (result.n_effective <= kExactSignedRankMaxN && !ranking.has_ties) {
    result.method = WilcoxonMethod::Exact;
    result.p_value = signed_rank_exact_p(result.w_plus, result.n_effective, alt);
  } else {
    if (result.n_effective < 5) {
      throw Error(ErrorCode::TooFewPairs, "normal approximation needs at least 5 nonzero pairs");
    }
    result.method = WilcoxonMethod::NormalApprox;
    result.p_value = signed_rank_normal_p(result.w_plus, result.n_effective, ranking.tie_term, alt);
  }
  return result;
}

}  // namespace gazeshift
