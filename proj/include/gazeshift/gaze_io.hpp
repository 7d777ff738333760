#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace gazeshift {

/// Gaze points as columns (x, y) in pixel coordinates.
using Points = Eigen::Matrix<double, 2, Eigen::Dynamic>;

struct VideoMeta {
  int width_px = 640;
  int height_px = 480;
  double fps = 15.0;
  std::int64_t n_frames = 0;  ///< 0 means "unknown", derived from the samples.

  double frame_duration_ms() const { return 1000.0 / fps; }
  double frames_to_ms(double frames) const { return frames * 1000.0 / fps; }

  /// Throws InvalidMeta unless width, height >= 1 and fps is finite and > 0.
  void validate() const;

  bool same_geometry(const VideoMeta& other) const {
    return width_px == other.width_px && height_px == other.height_px && fps == other.fps;
  }
};

/// Parses "width=W,height=H,fps=F[,frames=N]". Entries may also be separated by
/// newlines (sidecar files); '#' starts a comment. fps accepts "num/den".
VideoMeta parse_meta(std::string_view text);

struct GazeSample {
  std::int64_t frame_index = 0;
  double t_s = 0.0;
  double x_px = 0.0;
  double y_px = 0.0;
  bool valid = true;

  friend bool operator==(const GazeSample&, const GazeSample&) = default;
};

/// Immutable, frame-sorted gaze recording of one subject on one video.
class GazeStream {
 public:
  GazeStream() = default;

  /// Stable-sorts by (frame_index, t_s) and clears `valid` on any sample whose
  /// coordinates are non-finite or fall outside the image. Throws InvalidMeta for
  /// a bad meta and MalformedRow for negative or out-of-range frame indices.
  GazeStream(VideoMeta meta, std::vector<GazeSample> samples, std::string label = {});

  const VideoMeta& meta() const { return meta_; }
  const std::vector<GazeSample>& samples() const { return samples_; }
  const std::string& label() const { return label_; }

  /// meta().n_frames when known, otherwise one past the largest frame index.
  std::int64_t frame_count() const;

  /// Half-open index range [first, last) of samples on frames in [lo, hi].
  std::pair<std::size_t, std::size_t> frame_range(std::int64_t lo, std::int64_t hi) const;

 private:
  VideoMeta meta_;
  std::vector<GazeSample> samples_;
  std::string label_;
};

bool in_bounds(const VideoMeta& meta, double x, double y);

/// Strict parser for the canonical gaze CSV (frame,t_s,x_px,y_px,valid).
/// A first line whose first field is non-numeric is taken as a header.
/// Blank lines are ignored. Throws EmptyLog or MalformedRowError.
GazeStream parse_gaze_log(std::string_view raw_text, const VideoMeta& meta,
                          std::string label = {});

/// Canonical re-emission: header, integer frame, t_s with 6 decimals,
/// coordinates with 3 decimals, valid as 0/1.
std::string write_gaze_csv(const GazeStream& stream);

GazeStream read_gaze_file(const std::string& path, const VideoMeta& meta);
void write_gaze_file(const std::string& path, const GazeStream& stream);

/// Valid samples with frame_index in [frame - window, frame + window], in stream order.
Points samples_for_frame(const GazeStream& stream, std::int64_t frame, std::int64_t window);

struct ValidationReport {
  std::int64_t total = 0;
  std::int64_t valid = 0;
  std::int64_t invalid = 0;
  std::int64_t frames_with_no_valid_sample = 0;

  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

ValidationReport validate_stream(const GazeStream& stream);

/// Pools several subjects' samples on the same video into one stream.
/// All inputs must share geometry (MetaMismatch otherwise).
GazeStream merge_streams(const std::vector<GazeStream>& streams, std::string label = "merged");

}  // namespace gazeshift
