#include "gazeshift/shift.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "gazeshift/error.hpp"
#include "gazeshift/synth.hpp"
#include "gtest/gtest.h"

namespace gazeshift {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::Io;
}

// One row per frame 0..rows-1, columns from tau_min upwards.
ShiftSweepResult hand_result(int tau_min, const std::vector<std::vector<double>>& rows) {
  ShiftSweepResult r;
  const int cols = static_cast<int>(rows.front().size());
  r.grid = ShiftGrid{tau_min, tau_min + cols - 1, 1};
  r.metric = MetricKind::PCC;
  r.taus = r.grid.taus();
  r.scores.resize(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    r.frames.push_back(static_cast<std::int64_t>(i));
    for (int c = 0; c < cols; ++c) r.scores(static_cast<Eigen::Index>(i), c) = rows[i][static_cast<std::size_t>(c)];
  }
  r.aggregate();
  return r;
}

SynthParams small_params(std::uint64_t seed, std::int64_t lag, double jitter) {
  SynthParams p;
  p.seed = seed;
  p.n_frames = 120;
  p.lag_frames = lag;
  p.jitter_sigma_px = jitter;
  return p;
}

SweepOptions options(MetricKind metric) {
  SweepOptions o;
  o.metric = metric;
  o.kernel = KernelParams::from_sigma(10);
  return o;
}

TEST(ShiftGrid, ParsesAndEnumerates) {
  const auto g = parse_grid("-3:3:2");
  EXPECT_EQ(g.taus(), (std::vector<int>{-3, -1, 1, 3}));
  EXPECT_EQ(g.index_of(1), 2u);
  EXPECT_FALSE(g.index_of(0).has_value());
  EXPECT_EQ(parse_grid("0:2").taus(), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(code_of([] { parse_grid("5:-5"); }), ErrorCode::EmptyGrid);
  EXPECT_EQ(code_of([] { parse_grid("0:5:0"); }), ErrorCode::EmptyGrid);
}

TEST(ShiftSweep, SelfComparisonPeaksAtZeroWithOne) {
  const auto pair = generate_pair(small_params(3, 0, 0));
  const auto r = shift_sweep(pair.actor, pair.actor, ShiftGrid{-5, 5, 1}, options(MetricKind::PCC));
  const auto zero = *r.grid.index_of(0);
  EXPECT_NEAR(r.per_tau_mean[zero], 1.0, 1e-9);
  for (std::size_t c = 0; c < r.taus.size(); ++c) {
    if (c != zero) EXPECT_LT(r.per_tau_mean[c], r.per_tau_mean[zero]);
  }
  EXPECT_EQ(best_shift(r).tau, 0);
}

TEST(ShiftSweep, ExactDelayedCopyIsRecoveredByEveryMetric) {
  for (std::int64_t k : {-7, 0, 4}) {
    const auto pair = generate_pair(small_params(5, k, 0));
    for (auto metric : {MetricKind::NSS, MetricKind::AUC_POINTS, MetricKind::AUC_MAPS, MetricKind::PCC}) {
      const auto r = shift_sweep(pair.actor, pair.viewer, ShiftGrid{-10, 10, 1}, options(metric));
      EXPECT_EQ(best_shift(r).tau, k) << to_string(metric) << " k=" << k;
    }
  }
}

TEST(ShiftSweep, JitteredLagTenFromDefaults) {
  SynthParams p;  // seed 42, lag 10, jitter 10 px
  const auto pair = generate_pair(p);
  const auto r = shift_sweep(pair.actor, pair.viewer, ShiftGrid{-20, 20, 1}, options(MetricKind::AUC_MAPS));
  EXPECT_EQ(best_shift(r).tau, 10);
}

TEST(ShiftSweep, ColumnCountsMatchEnumeration) {
  auto p = small_params(9, 3, 5);
  p.dropout_prob = 0.6;  // leaves frames with no gaze on either side
  const auto pair = generate_pair(p);
  SweepOptions o = options(MetricKind::PCC);
  o.frame_step = 2;
  const ShiftGrid grid{-6, 6, 3};
  const auto r = shift_sweep(pair.actor, pair.viewer, grid, o);
  const std::int64_t n = 120;
  auto has_gaze = [](const GazeStream& s, std::int64_t t) { return samples_for_frame(s, t, 0).cols() > 0; };
  for (std::size_t c = 0; c < r.taus.size(); ++c) {
    std::int64_t expected = 0;
    for (std::int64_t t = 0; t < n; t += 2) {
      const std::int64_t v = t + r.taus[c];
      if (v >= 0 && v < n && has_gaze(pair.actor, t) && has_gaze(pair.viewer, v)) ++expected;
    }
    EXPECT_EQ(r.per_tau_n[c], expected) << r.taus[c];
  }
  EXPECT_EQ(r.frames.front(), 0);
  EXPECT_EQ(r.frames[1], 2);
}

TEST(ShiftSweep, ThreadCountDoesNotChangeResults) {
  const auto pair = generate_pair(small_params(11, 2, 8));
  for (auto metric : {MetricKind::NSS, MetricKind::AUC_MAPS}) {
    SweepOptions o = options(metric);
    const auto one = shift_sweep(pair.actor, pair.viewer, ShiftGrid{-4, 4, 1}, o);
    o.threads = 4;
    const auto four = shift_sweep(pair.actor, pair.viewer, ShiftGrid{-4, 4, 1}, o);
    EXPECT_EQ(write_scores_csv(one), write_scores_csv(four));
    EXPECT_EQ(write_sweep_report(one), write_sweep_report(four));
  }
}

TEST(ShiftSweep, MeanDegradesAwayFromTrueLag) {
  // averaged over seeds, the score falls as |tau - k| grows
  const int k = 6;
  const ShiftGrid grid{-12, 12, 1};
  std::vector<double> mean(grid.taus().size(), 0.0);
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const auto pair = generate_pair(small_params(seed, k, 10));
    const auto r = shift_sweep(pair.actor, pair.viewer, grid, options(MetricKind::PCC));
    for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += r.per_tau_mean[c] / 20.0;
  }
  auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double less = 0, equal = 0;
      for (double w : v) {
        less += w < v[i];
        equal += w == v[i];
      }
      r[i] = less + (equal + 1) / 2.0;
    }
    return r;
  };
  std::vector<double> dist;
  for (int tau : grid.taus()) dist.push_back(std::abs(tau - k));
  const auto rd = ranks(dist);
  const auto rm = ranks(mean);
  const double md = std::accumulate(rd.begin(), rd.end(), 0.0) / rd.size();
  const double mm = std::accumulate(rm.begin(), rm.end(), 0.0) / rm.size();
  double sdm = 0, sdd = 0, cov = 0;
  for (std::size_t i = 0; i < rd.size(); ++i) {
    cov += (rd[i] - md) * (rm[i] - mm);
    sdd += (rd[i] - md) * (rd[i] - md);
    sdm += (rm[i] - mm) * (rm[i] - mm);
  }
  EXPECT_LT(cov / std::sqrt(sdd * sdm), -0.9);
}

TEST(ShiftSweep, Errors) {
  const auto pair = generate_pair(small_params(1, 0, 0));
  const GazeStream other(VideoMeta{320, 240, 15.0, 0}, pair.actor.samples());
  EXPECT_EQ(code_of([&] { shift_sweep(pair.actor, other, ShiftGrid{-1, 1, 1}, options(MetricKind::PCC)); }),
            ErrorCode::MetaMismatch);
  EXPECT_EQ(code_of([&] { shift_sweep(pair.actor, pair.actor, ShiftGrid{1, -1, 1}, options(MetricKind::PCC)); }),
            ErrorCode::EmptyGrid);
  // viewer recording too short for any shifted comparison
  const GazeStream early(pair.actor.meta(), {{0, 0.0, 10, 10, true}});
  const GazeStream late(pair.actor.meta(), {{50, 0.0, 10, 10, true}});
  EXPECT_EQ(code_of([&] { shift_sweep(early, late, ShiftGrid{-2, 2, 1}, options(MetricKind::PCC)); }),
            ErrorCode::NoComparableFrames);
}

TEST(BestShift, UniqueArgmax) {
  const auto r = hand_result(-1, {{0.4, 0.6, 0.9, 0.6}});
  EXPECT_EQ(best_shift(r).tau, 1);
  EXPECT_DOUBLE_EQ(best_shift(r).mean_score, 0.9);
}

TEST(BestShift, TiesPreferSmallMagnitudeThenPositive) {
  EXPECT_EQ(best_shift(hand_result(-2, {{0.8, 0.1, 0.2, 0.1, 0.8}})).tau, 2);
  EXPECT_EQ(best_shift(hand_result(-2, {{0.8, 0.1, 0.2, 0.8, 0.8}})).tau, 1);
}

TEST(BestShift, IgnoresThinColumns) {
  // tau = 1 has the highest mean but only 1 of 4 frames
  const auto r = hand_result(0, {{0.5, 0.99}, {0.5, kNan}, {0.5, kNan}, {0.5, kNan}});
  EXPECT_EQ(r.per_tau_n, (std::vector<std::int64_t>{4, 1}));
  EXPECT_EQ(best_shift(r).tau, 0);
}

TEST(PairedScores, IntersectsPresentFrames) {
  const auto r = hand_result(0, {{kNan, 0.1}, {0.2, 0.3}, {0.4, 0.5}, {0.6, kNan}});
  const auto p = paired_scores(r, 0, 1);
  EXPECT_EQ(p.frames, (std::vector<std::int64_t>{1, 2}));
  EXPECT_EQ(p.a, (std::vector<double>{0.2, 0.4}));
  EXPECT_EQ(p.b, (std::vector<double>{0.3, 0.5}));
  const auto same = paired_scores(r, 1, 1);
  EXPECT_EQ(same.a, same.b);
  const auto disjoint = hand_result(0, {{0.1, kNan}, {kNan, 0.2}});
  EXPECT_EQ(code_of([&] { paired_scores(disjoint, 0, 1); }), ErrorCode::NoComparableFrames);
  EXPECT_EQ(code_of([&] { paired_scores(r, 0, 7); }), ErrorCode::TauNotInGrid);
}

TEST(Aggregate, MeanOfPairMeans) {
  const auto a = hand_result(0, {{0.2, 0.4}, {0.4, 0.4}});
  const auto b = hand_result(0, {{0.9, 0.1}});
  const auto agg = aggregate_sweeps({a, b});
  EXPECT_DOUBLE_EQ(agg.per_tau_mean[0], (0.3 + 0.9) / 2);
  EXPECT_DOUBLE_EQ(agg.per_tau_mean[1], (0.4 + 0.1) / 2);
  EXPECT_EQ(agg.per_tau_n, (std::vector<std::int64_t>{3, 3}));
}

TEST(Reports, SweepReportFormat) {
  const auto r = hand_result(9, {{0.5, 0.25}, {0.75, kNan}});
  EXPECT_EQ(write_sweep_report(r),
            "tau_frames,tau_ms,metric,mean,std,n\n"
            "9,600.000000,pcc,0.625000,0.125000,2\n"
            "10,666.666667,pcc,0.250000,0.000000,1\n");
}

TEST(Reports, ScoresCsvRoundTripIsLossless) {
  const auto pair = generate_pair(small_params(21, 3, 6));
  auto p = small_params(21, 3, 6);
  p.dropout_prob = 0.3;
  const auto lossy = generate_pair(p);
  for (const auto* pr : {&pair, &lossy}) {
    const auto r = shift_sweep(pr->actor, pr->viewer, ShiftGrid{-4, 4, 2}, options(MetricKind::NSS));
    const auto back = parse_scores_csv(write_scores_csv(r));
    EXPECT_EQ(back.taus, r.taus);
    EXPECT_EQ(back.frames, r.frames);
    EXPECT_EQ(back.per_tau_n, r.per_tau_n);
    EXPECT_EQ(back.per_tau_mean, r.per_tau_mean);
    EXPECT_EQ(write_scores_csv(back), write_scores_csv(r));
    EXPECT_EQ(best_shift(back).tau, best_shift(r).tau);
  }
}

}  // namespace
}  // namespace gazeshift
