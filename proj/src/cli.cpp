#include "gazeshift/cli.hpp"

#include <filesystem>
#include <ostream>
#include <string_view>

#include <CLI11.hpp>

#include "gazeshift/error.hpp"
#include "gazeshift/fixmap.hpp"
#include "gazeshift/format.hpp"
#include "gazeshift/gaze_io.hpp"
#include "gazeshift/io_util.hpp"
#include "gazeshift/map_export.hpp"
#include "gazeshift/shift.hpp"
#include "gazeshift/stats.hpp"
#include "gazeshift/synth.hpp"

namespace gazeshift::cli {

namespace {

/// Thrown for flag combinations CLI11 cannot express; exits with kUsage.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return kIoError;
    case ErrorCode::InvalidMeta:
    case ErrorCode::InvalidKernel:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidParams:
    case ErrorCode::EmptyGrid:
    case ErrorCode::TauNotInGrid: return kUsage;
    default: return kDomainError;
  }
}

/// --meta takes either inline key=value pairs or the path of a sidecar file.
VideoMeta load_meta(const std::string& spec) {
  if (spec.find('=') != std::string::npos) return parse_meta(spec);
  return parse_meta(read_text_file(spec));
}

GazeStream load_stream(const std::string& path, const VideoMeta& meta) {
  return read_gaze_file(path, meta);
}

struct MapArgs {
  std::string gaze;
  std::string meta;
  std::int64_t frame = 0;
  std::int64_t window = 0;
  double sigma = 25.0;
  std::string out_pgm;
  std::string out_csv;
};

int cmd_map(const MapArgs& a, std::ostream& out, std::ostream& err) {
  if (a.out_pgm.empty() && a.out_csv.empty()) {
    throw UsageError("map needs --out and/or --out-csv");
  }
  const VideoMeta meta = load_meta(a.meta);
  const KernelParams kernel = KernelParams::from_sigma(a.sigma);
  const GazeStream stream = load_stream(a.gaze, meta);
  const auto map = map_for_frame(stream, a.frame, a.window, kernel);
  if (!map) {
    err << "NoGaze: no valid gaze sample within " << a.window << " frame(s) of frame " << a.frame
        << '\n';
    return kDomainError;
  }
  if (!a.out_pgm.empty()) write_text_file(a.out_pgm, encode_pgm16(*map));
  if (!a.out_csv.empty()) write_text_file(a.out_csv, encode_map_csv(*map));
  out << "frame=" << a.frame << " width=" << map->width() << " height=" << map->height()
      << " max=" << format_fixed(map->values().maxCoeff(), 6) << '\n';
  return kOk;
}

struct SweepArgs {
  std::vector<std::string> actors;
  std::vector<std::string> viewers;
  std::string meta;
  std::string metric = "auc-maps";
  std::string tau = "-20:20";
  double sigma = 25.0;
  int frame_step = 1;
  double top_frac = 0.2;
  int threads = 1;
  std::string out_report;
  std::string out_scores;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream&) {
  const ShiftGrid grid = parse_grid(a.tau);
  SweepOptions options;
  options.metric = parse_metric(a.metric);
  options.kernel = KernelParams::from_sigma(a.sigma);
  options.frame_step = a.frame_step;
  options.top_frac = a.top_frac;
  options.threads = a.threads;
  if (!(a.top_frac > 0.0 && a.top_frac < 1.0)) throw UsageError("--top-frac must lie in (0, 1)");
  const VideoMeta meta = load_meta(a.meta);

  std::vector<GazeStream> actors;
  std::vector<GazeStream> viewers;
  for (const auto& p : a.actors) actors.push_back(load_stream(p, meta));
  for (const auto& p : a.viewers) viewers.push_back(load_stream(p, meta));

  ShiftSweepResult result;
  if (actors.size() == 1) {
    // one video: all viewers pooled into one map per frame
    const GazeStream viewer = viewers.size() == 1 ? viewers.front() : merge_streams(viewers, "viewers");
    result = shift_sweep(actors.front(), viewer, grid, options);
  } else {
    if (actors.size() != viewers.size()) {
      throw UsageError("give one --viewer per --actor, or a single --actor");
    }
    if (!a.out_scores.empty()) throw UsageError("--scores needs a single actor/viewer pair");
    std::vector<ShiftSweepResult> per_pair;
    for (std::size_t i = 0; i < actors.size(); ++i) {
      per_pair.push_back(shift_sweep(actors[i], viewers[i], grid, options));
    }
    result = aggregate_sweeps(per_pair);
  }

  if (!a.out_report.empty()) write_text_file(a.out_report, write_sweep_report(result));
  if (!a.out_scores.empty()) write_text_file(a.out_scores, write_scores_csv(result));
  const BestShift best = best_shift(result);
  out << "best_shift=" << best.tau << " (" << format_fixed(result.tau_ms(best.tau), 2)
      << " ms) mean=" << format_fixed(best.mean_score, 6) << '\n';
  return kOk;
}

struct WilcoxonArgs {
  std::string pairs;
  std::string scores;
  std::optional<int> tau_a;
  std::optional<int> tau_b;
  std::string alternative = "two-sided";
};

std::pair<std::vector<double>, std::vector<double>> read_pairs(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<double> x;
  std::vector<double> y;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const auto line = trim(std::string_view(text).substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    double a = 0.0;
    double b = 0.0;
    const bool ok = comma != std::string_view::npos && parse_double(line.substr(0, comma), a) &&
                    parse_double(line.substr(comma + 1), b);
    if (!ok) {
      if (x.empty() && line_no == 1) continue;  // header
      throw MalformedRowError(line_no, "expected two numeric columns");
    }
    x.push_back(a);
    y.push_back(b);
  }
  if (x.empty()) throw Error(ErrorCode::EmptyLog, "no pairs");
  return {x, y};
}

int cmd_wilcoxon(const WilcoxonArgs& a, std::ostream& out, std::ostream&) {
  const Alternative alt = parse_alternative(a.alternative);
  std::vector<double> x;
  std::vector<double> y;
  if (!a.pairs.empty() == !a.scores.empty()) throw UsageError("give exactly one of --pairs, --scores");
  if (!a.pairs.empty()) {
    std::tie(x, y) = read_pairs(a.pairs);
  } else {
    const ShiftSweepResult sweep = parse_scores_csv(read_text_file(a.scores));
    const int tau_a = a.tau_a ? *a.tau_a : best_shift(sweep).tau;
    const int tau_b = a.tau_b ? *a.tau_b : 0;
    PairedScores paired = paired_scores(sweep, tau_a, tau_b);
    x = std::move(paired.a);
    y = std::move(paired.b);
    out << "tau_a=" << tau_a << "\ntau_b=" << tau_b << "\nn_pairs=" << x.size() << '\n';
  }
  const WilcoxonResult r = wilcoxon_signed_rank(x, y, alt);
  out << "w_plus=" << format_fixed(r.w_plus, 6) << '\n'
      << "n_effective=" << r.n_effective << '\n'
      << "alternative=" << to_string(r.alternative) << '\n'
      << "method=" << to_string(r.method) << '\n'
      << "p_value=" << format_fixed(r.p_value, 6) << '\n';
  return kOk;
}

struct SynthArgs {
  std::string meta = "width=160,height=120,fps=15";
  std::int64_t frames = 0;
  std::uint64_t seed = 42;
  double smoothness = 0.9;
  std::int64_t lag = 10;
  double jitter = 10.0;
  double dropout = 0.0;
  std::string out_actor;
  std::string out_viewer;
};

int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream&) {
  SynthParams p;
  p.meta = load_meta(a.meta);
  p.n_frames = a.frames > 0 ? a.frames : (p.meta.n_frames > 0 ? p.meta.n_frames : 300);
  p.seed = a.seed;
  p.smoothness = a.smoothness;
  p.lag_frames = a.lag;
  p.jitter_sigma_px = a.jitter;
  p.dropout_prob = a.dropout;
  p.validate();
  const SyntheticPair pair = generate_pair(p);
  write_gaze_file(a.out_actor, pair.actor);
  write_gaze_file(a.out_viewer, pair.viewer);
  out << "lag_frames=" << pair.lag_frames << " ("
      << format_fixed(p.meta.frames_to_ms(static_cast<double>(pair.lag_frames)), 2) << " ms)\n";
  return kOk;
}

int cmd_validate(const std::string& gaze, const std::string& meta_spec, std::ostream& out) {
  const GazeStream stream = load_stream(gaze, load_meta(meta_spec));
  const ValidationReport r = validate_stream(stream);
  out << "total=" << r.total << "\nvalid=" << r.valid << "\ninvalid=" << r.invalid
      << "\nframes_with_no_valid_sample=" << r.frames_with_no_valid_sample << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Actor/viewer gaze saliency comparison over time shifts", "gazeshift"};
  app.require_subcommand(1);

  MapArgs map_args;
  auto* map = app.add_subcommand("map", "Render the saliency map of one frame");
  map->add_option("--gaze", map_args.gaze, "Gaze CSV")->required();
  map->add_option("--meta", map_args.meta, "width=W,height=H,fps=F[,frames=N] or sidecar file")
      ->required();
  map->add_option("--frame", map_args.frame)->required()->check(CLI::NonNegativeNumber);
  map->add_option("--window", map_args.window, "Frames on each side to pool")
      ->check(CLI::NonNegativeNumber);
  map->add_option("--sigma", map_args.sigma, "Gaussian std-dev in pixels")
      ->check(CLI::PositiveNumber);
  map->add_option("--out", map_args.out_pgm, "16-bit PGM output");
  map->add_option("--out-csv", map_args.out_csv, "Lossless CSV output");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Score actor vs viewer maps over a range of shifts");
  sweep->add_option("--actor", sweep_args.actors, "Actor gaze CSV (repeatable)")->required();
  sweep->add_option("--viewer", sweep_args.viewers, "Viewer gaze CSV (repeatable)")->required();
  sweep->add_option("--meta", sweep_args.meta)->required();
  sweep->add_option("--metric", sweep_args.metric)
      ->check(CLI::IsMember({"nss", "auc-points", "auc-maps", "pcc"}));
  sweep->add_option("--tau", sweep_args.tau, "MIN:MAX[:STEP] in frames");
  sweep->add_option("--sigma", sweep_args.sigma)->check(CLI::PositiveNumber);
  sweep->add_option("--frame-step", sweep_args.frame_step)->check(CLI::PositiveNumber);
  sweep->add_option("--top-frac", sweep_args.top_frac);
  sweep->add_option("--threads", sweep_args.threads)->check(CLI::PositiveNumber);
  sweep->add_option("--out", sweep_args.out_report, "Per-shift report CSV");
  sweep->add_option("--scores", sweep_args.out_scores, "Per-frame score CSV");

  WilcoxonArgs wx_args;
  auto* wx = app.add_subcommand("wilcoxon", "Wilcoxon signed-rank test on paired scores");
  wx->add_option("--pairs", wx_args.pairs, "CSV with two paired columns");
  wx->add_option("--scores", wx_args.scores, "Per-frame score CSV from sweep --scores");
  wx->add_option("--tau-a", wx_args.tau_a, "First shift (default: best shift)");
  wx->add_option("--tau-b", wx_args.tau_b, "Second shift (default: 0)");
  wx->add_option("--alternative", wx_args.alternative)
      ->check(CLI::IsMember({"two-sided", "greater", "less"}));

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic actor/viewer pair");
  synth->add_option("--meta", synth_args.meta);
  synth->add_option("--frames", synth_args.frames)->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_args.seed);
  synth->add_option("--smoothness", synth_args.smoothness);
  synth->add_option("--lag", synth_args.lag);
  synth->add_option("--jitter", synth_args.jitter);
  synth->add_option("--dropout", synth_args.dropout);
  synth->add_option("--out-actor", synth_args.out_actor)->required();
  synth->add_option("--out-viewer", synth_args.out_viewer)->required();

  std::string validate_gaze;
  std::string validate_meta;
  auto* validate = app.add_subcommand("validate", "Count valid and invalid samples");
  validate->add_option("--gaze", validate_gaze)->required();
  validate->add_option("--meta", validate_meta)->required();

  std::vector<std::string> argv_storage{"gazeshift"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == static_cast<int>(CLI::ExitCodes::Success) ? kOk : kUsage;
  }

  try {
    if (map->parsed()) return cmd_map(map_args, out, err);
    if (sweep->parsed()) return cmd_sweep(sweep_args, out, err);
    if (wx->parsed()) return cmd_wilcoxon(wx_args, out, err);
    if (synth->parsed()) return cmd_synth(synth_args, out, err);
    if (validate->parsed()) return cmd_validate(validate_gaze, validate_meta, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  return kUsage;
}

}  // namespace gazeshift::cli
