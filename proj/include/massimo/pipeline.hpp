#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "massimo/ci_outliers.hpp"
#include "massimo/config.hpp"
#include "massimo/ingest.hpp"
#include "massimo/linefit.hpp"
#include "massimo/render.hpp"
#include "massimo/report.hpp"
#include "massimo/springs.hpp"
#include "massimo/threshold.hpp"

namespace massimo {

/// Fewer than two usable people in the frame.
class InsufficientQueueError : public InsufficientDataError {
 public:
  using InsufficientDataError::InsufficientDataError;
};

/// Intermediate products of one run, in queue order.
struct Analysis {
  std::vector<QueuePoint> points;      ///< image coordinates
  std::vector<QueuePoint> fit_points;  ///< points as seen by the regression (x/y swapped if needed)
  bool axes_swapped = false;
  FittedLine line;
  std::optional<ResidualStats> stats;
  DirectionVector direction;  ///< image frame
  CiFlags ci;
  ForceField field;
  SpringFlags spring;
  std::vector<TopViewPoint> topview;
  AnalysisReport report;
};

/// ingest -> order -> fit -> CI flags -> spring forces -> Otsu flags -> top view.
/// `warnings` seeds the report's warning list (e.g. with parse warnings).
/// Throws InsufficientQueueError for < 2 usable people; FitError and
/// DegenerateGeometryError propagate when no model can be fitted.
Analysis analyze_frame(const PoseFrame& frame, const Config& config, Warnings warnings = {});

/// Decodes the frame's base image, resolving relative paths against
/// `search_dir` first. A missing path yields a blank canvas of the frame's
/// size plus a warning; an undecodable file throws RenderError.
PixelBuffer load_base_image(const PoseFrame& frame, const std::filesystem::path& search_dir,
                            Warnings* warnings = nullptr);

inline constexpr Rgb kBlankCanvas{235, 235, 235};

PixelBuffer render_analysis(const Analysis& analysis, const PixelBuffer& base, const StyleConfig& style);
std::string render_analysis_topview(const Analysis& analysis);

struct AnalyzeOutputs {
  AnalysisReport report;
  std::filesystem::path report_path;
  std::filesystem::path overlay_path;
  std::filesystem::path topview_path;
};

/// Renders and writes the outputs for an already parsed frame. Relative base
/// image paths are resolved against `search_dir`.
AnalyzeOutputs analyze_to_dir(const PoseFrame& frame, Warnings warnings,
                              const std::filesystem::path& search_dir, const Config& config,
                              const std::filesystem::path& out_dir);

/// Full run on one keypoint file; writes report.json, overlay.png and
/// topview.svg into `out_dir` (created if needed).
AnalyzeOutputs analyze_file(const std::filesystem::path& keypoints, const Config& config,
                            const std::filesystem::path& out_dir);

}  // namespace massimo
