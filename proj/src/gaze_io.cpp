#include "gazeshift/gaze_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gazeshift/error.hpp"
#include "gazeshift/format.hpp"
#include "gazeshift/io_util.hpp"

namespace gazeshift {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

bool parse_rational(std::string_view text, double& out) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_double(text, out);
  double num = 0.0;
  double den = 0.0;
  if (!parse_double(text.substr(0, slash), num) || !parse_double(text.substr(slash + 1), den) ||
      den == 0.0) {
    return false;
  }
  out = num / den;
  return true;
}

}  // namespace

void VideoMeta::validate() const {
  if (width_px < 1 || height_px < 1) {
    throw Error(ErrorCode::InvalidMeta, "image dimensions must be positive");
  }
  if (!std::isfinite(fps) || fps <= 0.0 || !std::isfinite(frame_duration_ms())) {
    throw Error(ErrorCode::InvalidMeta, "fps must be finite and positive");
  }
  if (n_frames < 0) throw Error(ErrorCode::InvalidMeta, "n_frames must be non-negative");
}

VideoMeta parse_meta(std::string_view text) {
  VideoMeta meta;
  bool have_w = false;
  bool have_h = false;
  bool have_fps = false;
  std::string normalized(text);
  std::replace(normalized.begin(), normalized.end(), '\n', ',');
  for (auto entry : split(normalized, ',')) {
    entry = trim(entry.substr(0, entry.find('#')));
    if (entry.empty()) continue;
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidMeta, "expected key=value, got '" + std::string(entry) + "'");
    }
    const auto key = trim(entry.substr(0, eq));
    const auto value = trim(entry.substr(eq + 1));
    long long iv = 0;
    if (key == "width") {
      if (!parse_int64(value, iv)) throw Error(ErrorCode::InvalidMeta, "bad width");
      meta.width_px = static_cast<int>(iv);
      have_w = true;
    } else if (key == "height") {
      if (!parse_int64(value, iv)) throw Error(ErrorCode::InvalidMeta, "bad height");
      meta.height_px = static_cast<int>(iv);
      have_h = true;
    } else if (key == "fps") {
      if (!parse_rational(value, meta.fps)) throw Error(ErrorCode::InvalidMeta, "bad fps");
      have_fps = true;
    } else if (key == "frames" || key == "n_frames") {
      if (!parse_int64(value, iv)) throw Error(ErrorCode::InvalidMeta, "bad frame count");
      meta.n_frames = iv;
    } else {
      throw Error(ErrorCode::InvalidMeta, "unknown key '" + std::string(key) + "'");
    }
  }
  if (!have_w || !have_h || !have_fps) {
    throw Error(ErrorCode::InvalidMeta, "width, height and fps are required");
  }
  meta.validate();
  return meta;
}

bool in_bounds(const VideoMeta& meta, double x, double y) {
  return std::isfinite(x) && std::isfinite(y) && x >= 0.0 && y >= 0.0 && x < meta.width_px &&
         y < meta.height_px;
}

GazeStream::GazeStream(VideoMeta meta, std::vector<GazeSample> samples, std::string label)
    : meta_(meta), samples_(std::move(samples)), label_(std::move(label)) {
  meta_.validate();
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    auto& s = samples_[i];
    if (s.frame_index < 0 || (meta_.n_frames > 0 && s.frame_index >= meta_.n_frames)) {
      throw MalformedRowError(i + 1, "frame index " + std::to_string(s.frame_index) +
                                         " outside the video");
    }
    if (!std::isfinite(s.t_s)) throw MalformedRowError(i + 1, "non-finite timestamp");
    if (s.valid && !in_bounds(meta_, s.x_px, s.y_px)) s.valid = false;
  }
  std::stable_sort(samples_.begin(), samples_.end(), [](const GazeSample& a, const GazeSample& b) {
    if (a.frame_index != b.frame_index) return a.frame_index < b.frame_index;
    return a.t_s < b.t_s;
  });
}

std::int64_t GazeStream::frame_count() const {
  if (meta_.n_frames > 0) return meta_.n_frames;
  return samples_.empty() ? 0 : samples_.back().frame_index + 1;
}

std::pair<std::size_t, std::size_t> GazeStream::frame_range(std::int64_t lo,
                                                            std::int64_t hi) const {
  const auto first = std::lower_bound(
      samples_.begin(), samples_.end(), lo,
      [](const GazeSample& s, std::int64_t f) { return s.frame_index < f; });
  const auto last = std::upper_bound(
      first, samples_.end(), hi,
      [](std::int64_t f, const GazeSample& s) { return f < s.frame_index; });
  return {static_cast<std::size_t>(first - samples_.begin()),
          static_cast<std::size_t>(last - samples_.begin())};
}

GazeStream parse_gaze_log(std::string_view raw_text, const VideoMeta& meta, std::string label) {
  meta.validate();
  std::vector<GazeSample> samples;
  std::size_t line_no = 0;
  std::size_t start = 0;
  bool first_content_line = true;
  while (start <= raw_text.size()) {
    auto end = raw_text.find('\n', start);
    if (end == std::string_view::npos) end = raw_text.size();
    const auto line = trim(raw_text.substr(start, end - start));
    ++line_no;
    start = end + 1;
    if (line.empty()) {
      if (end == raw_text.size()) break;
      continue;
    }
    const auto fields = split(line, ',');
    if (first_content_line) {
      first_content_line = false;
      double probe = 0.0;
      if (!parse_double(fields.front(), probe)) continue;  // header
    }
    if (fields.size() != 5) {
      throw MalformedRowError(line_no, "expected 5 columns, got " + std::to_string(fields.size()));
    }
    GazeSample s;
    long long frame = 0;
    long long valid = 0;
    if (!parse_int64(fields[0], frame) || frame < 0) {
      throw MalformedRowError(line_no, "bad frame index");
    }
    if (!parse_double(fields[1], s.t_s) || !std::isfinite(s.t_s)) {
      throw MalformedRowError(line_no, "bad timestamp");
    }
    if (!parse_double(fields[2], s.x_px)) throw MalformedRowError(line_no, "bad x coordinate");
    if (!parse_double(fields[3], s.y_px)) throw MalformedRowError(line_no, "bad y coordinate");
    if (!parse_int64(fields[4], valid) || (valid != 0 && valid != 1)) {
      throw MalformedRowError(line_no, "valid flag must be 0 or 1");
    }
    if (meta.n_frames > 0 && frame >= meta.n_frames) {
      throw MalformedRowError(line_no, "frame index beyond n_frames");
    }
    s.frame_index = frame;
    s.valid = valid == 1 && in_bounds(meta, s.x_px, s.y_px);
    samples.push_back(s);
    if (end == raw_text.size()) break;
  }
  if (samples.empty()) throw Error(ErrorCode::EmptyLog, "no data rows");
  return GazeStream(meta, std::move(samples), std::move(label));
}

std::string write_gaze_csv(const GazeStream& stream) {
  std::string out = "frame,t_s,x_px,y_px,valid\n";
  for (const auto& s : stream.samples()) {
    out += std::to_string(s.frame_index);
    out += ',';
    out += format_fixed(s.t_s, 6);
    out += ',';
    out += format_fixed(s.x_px, 3);
    out += ',';
    out += format_fixed(s.y_px, 3);
    out += s.valid ? ",1\n" : ",0\n";
  }
  return out;
}

GazeStream read_gaze_file(const std::string& path, const VideoMeta& meta) {
  return parse_gaze_log(read_text_file(path), meta, path);
}

void write_gaze_file(const std::string& path, const GazeStream& stream) {
  write_text_file(path, write_gaze_csv(stream));
}

Points samples_for_frame(const GazeStream& stream, std::int64_t frame, std::int64_t window) {
  const auto [first, last] = stream.frame_range(frame - window, frame + window);
  const auto& samples = stream.samples();
  Eigen::Index n = 0;
  for (auto i = first; i < last; ++i) n += samples[i].valid ? 1 : 0;
  Points points(2, n);
  Eigen::Index col = 0;
  for (auto i = first; i < last; ++i) {
    if (!samples[i].valid) continue;
    points(0, col) = samples[i].x_px;
    points(1, col) = samples[i].y_px;
    ++col;
  }
  return points;
}

ValidationReport validate_stream(const GazeStream& stream) {
  ValidationReport report;
  const auto n_frames = stream.frame_count();
  std::vector<char> has_valid(static_cast<std::size_t>(n_frames), 0);
  for (const auto& s : stream.samples()) {
    ++report.total;
    if (s.valid) {
      ++report.valid;
      if (s.frame_index < n_frames) has_valid[static_cast<std::size_t>(s.frame_index)] = 1;
    } else {
      ++report.invalid;
    }
  }
  report.frames_with_no_valid_sample = std::count(has_valid.begin(), has_valid.end(), 0);
  return report;
}

GazeStream merge_streams(const std::vector<GazeStream>& streams, std::string label) {
  if (streams.empty()) throw Error(ErrorCode::InvalidArgument, "nothing to merge");
  VideoMeta meta = streams.front().meta();
  std::vector<GazeSample> all;
  for (const auto& s : streams) {
    if (!s.meta().same_geometry(meta)) {
      throw Error(ErrorCode::MetaMismatch, "streams disagree on dimensions or fps");
    }
    meta.n_frames = std::max(meta.n_frames, s.meta().n_frames);
    all.insert(all.end(), s.samples().begin(), s.samples().end());
  }
  return GazeStream(meta, std::move(all), std::move(label));
}

}  // namespace gazeshift
