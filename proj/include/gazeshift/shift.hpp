#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "gazeshift/fixmap.hpp"
#include "gazeshift/gaze_io.hpp"
#include "gazeshift/simmetrics.hpp"

namespace gazeshift {

/// Frame offsets tau_min, tau_min + step, ..., <= tau_max. Positive tau compares
/// the actor's frame t with the viewer's frame t + tau (viewer lags actor).
struct ShiftGrid {
  int tau_min = -20;
  int tau_max = 20;
  int step = 1;

  /// Throws EmptyGrid.
  void validate() const;
  std::vector<int> taus() const;
  std::optional<std::size_t> index_of(int tau) const;
};

/// Parses "MIN:MAX[:STEP]".
ShiftGrid parse_grid(std::string_view text);

struct SweepOptions {
  MetricKind metric = MetricKind::AUC_MAPS;
  KernelParams kernel = KernelParams::from_sigma(25.0);
  int frame_step = 1;
  double top_frac = 0.2;
  int threads = 1;  ///< results are bit-identical for any thread count
};

struct ShiftSweepResult {
  ShiftGrid grid;
  MetricKind metric = MetricKind::AUC_MAPS;
  double fps = 15.0;
  std::vector<std::int64_t> frames;  ///< evaluated actor frames (rows)
  std::vector<int> taus;             ///< grid shifts (columns)
  Eigen::MatrixXd scores;            ///< NaN marks an absent cell
  std::vector<double> per_tau_mean;
  std::vector<double> per_tau_std;   ///< population std of the present scores
  std::vector<std::int64_t> per_tau_n;

  std::optional<double> score(std::size_t row, std::size_t col) const;
  double tau_ms(int tau) const { return tau * 1000.0 / fps; }

  /// Recomputes the per-tau aggregates from `scores`.
  void aggregate();
};

/// Scores every (actor frame t, tau) cell. PCC and AUC_MAPS compare the actor
/// map at t with the viewer map at t + tau (the actor map is the candidate for
/// AUC_MAPS, the viewer map the reference). NSS and AUC_POINTS evaluate the
/// actor's raw gaze points at t on the viewer map at t + tau. Cells where
/// t + tau leaves the viewer recording or either side has no gaze are absent.
ShiftSweepResult shift_sweep(const GazeStream& actor, const GazeStream& viewer,
                             const ShiftGrid& grid, const SweepOptions& options);

struct BestShift {
  int tau = 0;
  double mean_score = 0.0;
};

/// Highest per-tau mean among columns holding at least half the largest column
/// count. Ties go to the smallest |tau|, then to positive tau.
BestShift best_shift(const ShiftSweepResult& result);

struct PairedScores {
  std::vector<std::int64_t> frames;
  std::vector<double> a;
  std::vector<double> b;
};

/// Per-frame scores at two shifts, restricted to frames where both are present.
PairedScores paired_scores(const ShiftSweepResult& result, int tau_a, int tau_b);

/// Cross-pair aggregate: per tau, the simple mean of each pair's per-tau mean.
/// per_tau_n is the summed frame count and per_tau_std the spread of the pair means.
ShiftSweepResult aggregate_sweeps(const std::vector<ShiftSweepResult>& results);

/// tau_frames,tau_ms,metric,mean,std,n with 6-decimal fixed formatting.
std::string write_sweep_report(const ShiftSweepResult& result);

/// frame,tau_frames,metric,score for every cell; absent cells read "nan" and
/// present scores are written losslessly.
std::string write_scores_csv(const ShiftSweepResult& result);
ShiftSweepResult parse_scores_csv(std::string_view text, double fps = 15.0);

}  // namespace gazeshift
