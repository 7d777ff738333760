#include "gazeshift/shift.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <set>
#include <thread>

#include "gazeshift/error.hpp"
#include "gazeshift/format.hpp"

namespace gazeshift {

void ShiftGrid::validate() const {
  if (step < 1) throw Error(ErrorCode::EmptyGrid, "step must be positive");
  if (tau_min > tau_max) throw Error(ErrorCode::EmptyGrid, "tau_min exceeds tau_max");
}

std::vector<int> ShiftGrid::taus() const {
  validate();
  std::vector<int> out;
  for (long tau = tau_min; tau <= tau_max; tau += step) out.push_back(static_cast<int>(tau));
  return out;
}

std::optional<std::size_t> ShiftGrid::index_of(int tau) const {
  if (tau < tau_min || tau > tau_max || (tau - tau_min) % step != 0) return std::nullopt;
  return static_cast<std::size_t>((tau - tau_min) / step);
}

ShiftGrid parse_grid(std::string_view text) {
  std::vector<long long> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = text.find(':', start);
    long long v = 0;
    const auto field = text.substr(start, colon == std::string_view::npos ? std::string_view::npos
                                                                          : colon - start);
    if (!parse_int64(field, v)) {
      throw Error(ErrorCode::InvalidArgument, "bad shift grid '" + std::string(text) + "'");
    }
    parts.push_back(v);
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts.size() < 2 || parts.size() > 3) {
    throw Error(ErrorCode::InvalidArgument, "shift grid must be MIN:MAX[:STEP]");
  }
  ShiftGrid grid{static_cast<int>(parts[0]), static_cast<int>(parts[1]),
                 parts.size() == 3 ? static_cast<int>(parts[2]) : 1};
  grid.validate();
  return grid;
}

std::optional<double> ShiftSweepResult::score(std::size_t row, std::size_t col) const {
  const double v = scores(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  if (std::isnan(v)) return std::nullopt;
  return v;
}

void ShiftSweepResult::aggregate() {
  const auto n_cols = static_cast<std::size_t>(scores.cols());
  per_tau_mean.assign(n_cols, std::numeric_limits<double>::quiet_NaN());
  per_tau_std.assign(n_cols, std::numeric_limits<double>::quiet_NaN());
  per_tau_n.assign(n_cols, 0);
  for (std::size_t c = 0; c < n_cols; ++c) {
    double sum = 0.0;
    std::int64_t n = 0;
    for (Eigen::Index r = 0; r < scores.rows(); ++r) {
      const double v = scores(r, static_cast<Eigen::Index>(c));
      if (std::isnan(v)) continue;
      sum += v;
      ++n;
    }
    per_tau_n[c] = n;
    if (n == 0) continue;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (Eigen::Index r = 0; r < scores.rows(); ++r) {
      const double v = scores(r, static_cast<Eigen::Index>(c));
      if (!std::isnan(v)) ss += (v - mean) * (v - mean);
    }
    per_tau_mean[c] = mean;
    per_tau_std[c] = std::sqrt(ss / static_cast<double>(n));
  }
}

namespace {

bool is_degenerate(const Error& e) {
  return e.code() == ErrorCode::DegenerateMap || e.code() == ErrorCode::AllPixelsPositive;
}

// Everything one viewer frame contributes to a cell, computed once per frame.
struct ViewerFrame {
  bool present = false;
  SaliencyMapd map;
  Eigen::ArrayXd flat;
  CenteredMap centered;
  MapMoments moments;
  SortedPixels sorted;
  ReferenceLabels labels;
};

struct ActorFrame {
  bool present = false;
  Points points;
  CenteredMap centered;
  CandidateRanks ranks;
};

class SweepWorker {
 public:
  SweepWorker(const GazeStream& actor, const GazeStream& viewer, const SweepOptions& options)
      : actor_(actor), viewer_(viewer), options_(options) {}

  void run(const std::vector<std::int64_t>& frames, const std::vector<int>& taus,
           std::size_t row_begin, std::size_t row_end, Eigen::MatrixXd& scores) {
    const std::int64_t viewer_frames = viewer_.frame_count();
    for (std::size_t row = row_begin; row < row_end; ++row) {
      const std::int64_t t = frames[row];
      evict_before(t + taus.front());
      const ActorFrame a = actor_frame(t);
      if (!a.present) continue;
      for (std::size_t col = 0; col < taus.size(); ++col) {
        const std::int64_t vt = t + taus[col];
        if (vt < 0 || vt >= viewer_frames) continue;
        const ViewerFrame& v = viewer_frame(vt);
        if (!v.present) continue;
        scores(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = cell(a, v);
      }
    }
  }

 private:
  ActorFrame actor_frame(std::int64_t t) const {
    ActorFrame a;
    a.points = samples_for_frame(actor_, t, 0);
    if (a.points.cols() == 0) return a;
    const ImageSize size = ImageSize::of(actor_.meta());
    try {
      switch (options_.metric) {
        case MetricKind::PCC:
          a.centered = center_map(build_fixation_map(a.points, size, options_.kernel));
          break;
        case MetricKind::AUC_MAPS:
          a.ranks = rank_candidate(build_fixation_map(a.points, size, options_.kernel));
          break;
        case MetricKind::NSS:
        case MetricKind::AUC_POINTS:
          break;
      }
    } catch (const Error& e) {
      if (!is_degenerate(e)) throw;
      return a;
    }
    a.present = true;
    return a;
  }

  const ViewerFrame& viewer_frame(std::int64_t vt) {
    auto it = cache_.find(vt);
    if (it != cache_.end()) return it->second;
    ViewerFrame& v = cache_[vt];
    auto map = map_for_frame(viewer_, vt, 0, options_.kernel);
    if (!map) return v;
    try {
      switch (options_.metric) {
        case MetricKind::PCC:
          v.centered = center_map(*map);
          break;
        case MetricKind::NSS:
          v.moments = moments(*map);
          v.map = std::move(*map);
          break;
        case MetricKind::AUC_POINTS:
          v.flat = flatten(*map);
          v.sorted = sort_pixels(*map);
          break;
        case MetricKind::AUC_MAPS:
          v.labels = label_reference(*map, options_.top_frac);
          break;
      }
    } catch (const Error& e) {
      if (!is_degenerate(e)) throw;
      return v;
    }
    v.present = true;
    return v;
  }

  double cell(const ActorFrame& a, const ViewerFrame& v) const {
    switch (options_.metric) {
      case MetricKind::PCC: return pcc(a.centered, v.centered).value;
      case MetricKind::NSS: return nss(v.map, v.moments, a.points).value;
      case MetricKind::AUC_POINTS:
        try {
          return auc_points(v.flat, v.sorted, a.points).value;
        } catch (const Error& e) {
          if (!is_degenerate(e)) throw;
          return std::numeric_limits<double>::quiet_NaN();
        }
      case MetricKind::AUC_MAPS: return auc_maps(a.ranks, v.labels).value;
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  void evict_before(std::int64_t frame) { cache_.erase(cache_.begin(), cache_.lower_bound(frame)); }

  const GazeStream& actor_;
  const GazeStream& viewer_;
  const SweepOptions& options_;
  std::map<std::int64_t, ViewerFrame> cache_;
};

}  // namespace

ShiftSweepResult shift_sweep(const GazeStream& actor, const GazeStream& viewer,
                             const ShiftGrid& grid, const SweepOptions& options) {
  grid.validate();
  if (!actor.meta().same_geometry(viewer.meta())) {
    throw Error(ErrorCode::MetaMismatch, "actor and viewer differ in dimensions or fps");
  }
  if (options.frame_step < 1) throw Error(ErrorCode::InvalidArgument, "frame_step must be >= 1");
  options.kernel.validate();
  if (options.metric == MetricKind::AUC_MAPS && !(options.top_frac > 0.0 && options.top_frac < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "top_frac must lie in (0, 1)");
  }

  ShiftSweepResult result;
  result.grid = grid;
  result.metric = options.metric;
  result.fps = actor.meta().fps;
  result.taus = grid.taus();
  for (std::int64_t t = 0; t < actor.frame_count(); t += options.frame_step) {
    result.frames.push_back(t);
  }
  result.scores = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(result.frames.size()),
                                            static_cast<Eigen::Index>(result.taus.size()),
                                            std::numeric_limits<double>::quiet_NaN());

  const std::size_t rows = result.frames.size();
  const std::size_t n_threads =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(options.threads, 1)), 1,
                              std::max<std::size_t>(rows, 1));
  if (n_threads == 1) {
    SweepWorker(actor, viewer, options).run(result.frames, result.taus, 0, rows, result.scores);
  } else {
    // contiguous row blocks; every cell is written by exactly one worker
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(n_threads);
    for (std::size_t k = 0; k < n_threads; ++k) {
      const std::size_t begin = rows * k / n_threads;
      const std::size_t end = rows * (k + 1) / n_threads;
      pool.emplace_back([&, k, begin, end] {
        try {
          SweepWorker(actor, viewer, options).run(result.frames, result.taus, begin, end,
                                                  result.scores);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  result.aggregate();
  if (std::all_of(result.per_tau_n.begin(), result.per_tau_n.end(),
                  [](std::int64_t n) { return n == 0; })) {
    throw Error(ErrorCode::NoComparableFrames, "no (frame, shift) cell has gaze on both sides");
  }
  return result;
}

BestShift best_shift(const ShiftSweepResult& result) {
  const std::int64_t max_n =
      result.per_tau_n.empty() ? 0 : *std::max_element(result.per_tau_n.begin(), result.per_tau_n.end());
  if (max_n == 0) throw Error(ErrorCode::NoComparableFrames, "no column has scores");
  std::optional<std::size_t> best;
  auto better = [&](std::size_t c, std::size_t b) {
    const double mc = result.per_tau_mean[c];
    const double mb = result.per_tau_mean[b];
    if (mc != mb) return mc > mb;
    const int tc = result.taus[c];
    const int tb = result.taus[b];
    if (std::abs(tc) != std::abs(tb)) return std::abs(tc) < std::abs(tb);
    return tc > tb;
  };
  for (std::size_t c = 0; c < result.taus.size(); ++c) {
    if (2 * result.per_tau_n[c] < max_n) continue;
    if (!best || better(c, *best)) best = c;
  }
  return {result.taus[*best], result.per_tau_mean[*best]};
}

PairedScores paired_scores(const ShiftSweepResult& result, int tau_a, int tau_b) {
  auto column = [&](int tau) {
    const auto it = std::find(result.taus.begin(), result.taus.end(), tau);
    if (it == result.taus.end()) {
      throw Error(ErrorCode::TauNotInGrid, "shift " + std::to_string(tau) + " not in the grid");
    }
    return static_cast<std::size_t>(it - result.taus.begin());
  };
  const std::size_t ca = column(tau_a);
  const std::size_t cb = column(tau_b);
  PairedScores out;
  for (std::size_t row = 0; row < result.frames.size(); ++row) {
    const auto a = result.score(row, ca);
    const auto b = result.score(row, cb);
    if (!a || !b) continue;
    out.frames.push_back(result.frames[row]);
    out.a.push_back(*a);
    out.b.push_back(*b);
  }
  if (out.frames.empty()) {
    throw Error(ErrorCode::NoComparableFrames, "the two shifts share no scored frame");
  }
  return out;
}

ShiftSweepResult aggregate_sweeps(const std::vector<ShiftSweepResult>& results) {
  if (results.empty()) throw Error(ErrorCode::NoComparableFrames, "no sweeps to aggregate");
  ShiftSweepResult out;
  out.grid = results.front().grid;
  out.metric = results.front().metric;
  out.fps = results.front().fps;
  out.taus = results.front().taus;
  const std::size_t n_cols = out.taus.size();
  out.per_tau_mean.assign(n_cols, std::numeric_limits<double>::quiet_NaN());
  out.per_tau_std.assign(n_cols, std::numeric_limits<double>::quiet_NaN());
  out.per_tau_n.assign(n_cols, 0);
  for (const auto& r : results) {
    if (r.taus != out.taus || r.metric != out.metric) {
      throw Error(ErrorCode::MetaMismatch, "sweeps use different grids or metrics");
    }
  }
  for (std::size_t c = 0; c < n_cols; ++c) {
    std::vector<double> means;
    for (const auto& r : results) {
      if (r.per_tau_n[c] == 0) continue;
      means.push_back(r.per_tau_mean[c]);
      out.per_tau_n[c] += r.per_tau_n[c];
    }
    if (means.empty()) continue;
    double sum = 0.0;
    for (double m : means) sum += m;
    const double mean = sum / static_cast<double>(means.size());
    double ss = 0.0;
    for (double m : means) ss += (m - mean) * (m - mean);
    out.per_tau_mean[c] = mean;
    out.per_tau_std[c] = std::sqrt(ss / static_cast<double>(means.size()));
  }
  return out;
}

std::string write_sweep_report(const ShiftSweepResult& result) {
  std::string out = "tau_frames,tau_ms,metric,mean,std,n\n";
  for (std::size_t c = 0; c < result.taus.size(); ++c) {
    out += std::to_string(result.taus[c]);
    out += ',' + format_fixed(result.tau_ms(result.taus[c]), 6);
    out += ',';
    out += to_string(result.metric);
    out += ',' + format_fixed(result.per_tau_mean[c], 6);
    out += ',' + format_fixed(result.per_tau_std[c], 6);
    out += ',' + std::to_string(result.per_tau_n[c]) + '\n';
  }
  return out;
}

std::string write_scores_csv(const ShiftSweepResult& result) {
  std::string out = "frame,tau_frames,metric,score\n";
  const char* metric = to_string(result.metric);
  for (std::size_t row = 0; row < result.frames.size(); ++row) {
    for (std::size_t col = 0; col < result.taus.size(); ++col) {
      const auto s = result.score(row, col);
      out += std::to_string(result.frames[row]) + ',' + std::to_string(result.taus[col]) + ',' +
             metric + ',' + (s ? format_roundtrip(*s) : std::string("nan")) + '\n';
    }
  }
  return out;
}

ShiftSweepResult parse_scores_csv(std::string_view text, double fps) {
  struct Cell {
    std::int64_t frame;
    int tau;
    double score;
  };
  std::vector<Cell> cells;
  std::set<std::int64_t> frames;
  std::set<int> taus;
  std::optional<MetricKind> metric;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty() || line_no == 1) continue;  // header
    std::vector<std::string_view> f;
    std::size_t fs = 0;
    while (true) {
      const auto comma = line.find(',', fs);
      f.push_back(line.substr(fs, comma == std::string_view::npos ? std::string_view::npos
                                                                  : comma - fs));
      if (comma == std::string_view::npos) break;
      fs = comma + 1;
    }
    long long frame = 0;
    long long tau = 0;
    double score = 0.0;
    if (f.size() != 4 || !parse_int64(f[0], frame) || !parse_int64(f[1], tau) ||
        !parse_double(f[3], score)) {
      throw MalformedRowError(line_no, "expected frame,tau_frames,metric,score");
    }
    const MetricKind kind = parse_metric(trim(f[2]));
    if (metric && *metric != kind) throw MalformedRowError(line_no, "mixed metrics");
    metric = kind;
    cells.push_back({frame, static_cast<int>(tau), score});
    frames.insert(frame);
    taus.insert(static_cast<int>(tau));
  }
  if (cells.empty()) throw Error(ErrorCode::EmptyLog, "no score rows");

  ShiftSweepResult r;
  r.metric = *metric;
  r.fps = fps;
  r.frames.assign(frames.begin(), frames.end());
  r.taus.assign(taus.begin(), taus.end());
  r.grid.tau_min = r.taus.front();
  r.grid.tau_max = r.taus.back();
  r.grid.step = r.taus.size() > 1 ? r.taus[1] - r.taus[0] : 1;
  r.scores = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(r.frames.size()),
                                       static_cast<Eigen::Index>(r.taus.size()),
                                       std::numeric_limits<double>::quiet_NaN());
  for (const auto& c : cells) {
    const auto row = std::lower_bound(r.frames.begin(), r.frames.end(), c.frame) - r.frames.begin();
    const auto col = std::lower_bound(r.taus.begin(), r.taus.end(), c.tau) - r.taus.begin();
    r.scores(row, col) = c.score;
  }
  r.aggregate();
  return r;
}

}  // namespace gazeshift
