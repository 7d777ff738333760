#pragma once

#include <span>
#include <string_view>

namespace gazeshift {

enum class Alternative { TwoSided, Greater, Less };
enum class WilcoxonMethod { Exact, NormalApprox };

const char* to_string(Alternative alt) noexcept;
const char* to_string(WilcoxonMethod method) noexcept;
/// two-sided | greater | less
Alternative parse_alternative(std::string_view name);

struct WilcoxonResult {
  double w_plus = 0.0;
  int n_effective = 0;
  double p_value = 1.0;
  Alternative alternative = Alternative::TwoSided;
  WilcoxonMethod method = WilcoxonMethod::Exact;
};

constexpr int kExactSignedRankMaxN = 20;

/// P(W+ <= w) under H0 for ranks 1..n, 1 <= n <= 20. Exact: counts are integers
/// and the result is count / 2^n.
double exact_signed_rank_cdf(double w, int n);

/// Exact p-value of an observed W+ under the given alternative (tie-free ranks).
double signed_rank_exact_p(double w_plus, int n, Alternative alt);

/// Normal approximation with continuity correction 0.5. `tie_term` is
/// sum(t^3 - t) over tie groups of |d|; it reduces the variance by tie_term / 48.
double signed_rank_normal_p(double w_plus, int n, double tie_term, Alternative alt);

/// Paired signed-rank test on d = x - y. Zero differences are dropped.
/// Exact when n_effective <= 20 with no ties in |d|, normal approximation otherwise.
/// Alternative "greater" tests whether x tends to exceed y.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y,
                                    Alternative alt = Alternative::TwoSided);

}  // namespace gazeshift
