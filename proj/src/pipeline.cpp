#include "massimo/pipeline.hpp"

#include <fstream>

#include "massimo/image_io.hpp"

namespace massimo {

namespace {

std::vector<QueuePoint> swap_axes(std::vector<QueuePoint> points)
{
  for (auto& p : points) std::swap(p.x, p.y);
  return points;
}

// Chord of the fitted curve from the first to the last point, in fit coordinates.
DirectionVector regression_direction(const std::vector<QueuePoint>& fit_points, const FittedLine& line)
{
  const double x0 = fit_points.front().x;
  double x1 = fit_points.back().x;
  if (x1 == x0) x1 = x0 + 1.0;
  return {x1 - x0, predict(line, x1) - predict(line, x0)};
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

Analysis analyze_frame(const PoseFrame& frame, const Config& config, Warnings warnings)
{
  config.validate();
  Analysis a;

  a.points = order_queue(hip_midpoints(frame, config.conf_threshold, &warnings));
  if (a.points.size() < 2) {
    throw InsufficientQueueError("insufficient queue: " + std::to_string(a.points.size()) +
                                 " usable people, need at least 2");
  }

  a.fit_points = a.points;
  try {
    a.line = fit_line(a.fit_points, config.model);
  } catch (const DegenerateGeometryError&) {
    a.fit_points = swap_axes(a.points);
    a.line = fit_line(a.fit_points, config.model);
    a.axes_swapped = true;
    warnings.push_back("near-vertical queue: regression fitted as x on y (axes swapped)");
  }

  if (a.fit_points.size() >= 3) {
    a.stats = residual_stats(a.line, a.fit_points);
    a.ci = flag_ci_outliers(a.fit_points, a.line, *a.stats, config.band);
  } else {
    warnings.push_back("confidence band needs at least 3 people; no CI outliers");
    a.ci.band = config.band;
    for (const auto& p : a.fit_points) {
      const double yhat = predict(a.line, p.x);
      a.ci.people.push_back({p.person_id, yhat, yhat, yhat, false});
    }
  }

  DirectionVector fit_dir = regression_direction(a.fit_points, a.line);
  if (a.axes_swapped) std::swap(fit_dir.dx, fit_dir.dy);
  if (config.direction == DirectionMode::endpoints) {
    try {
      a.direction = direction_vector(a.points);
    } catch (const DegenerateGeometryError&) {
      warnings.push_back("first and last person coincide; using the regression direction");
      a.direction = fit_dir;
    }
  } else {
    a.direction = fit_dir;
  }

  a.field = chain_forces(a.points, a.direction, config.spring, &warnings);
  a.spring = flag_force_outliers(a.field, &warnings);
  a.topview = top_view(a.fit_points, a.line);

  AnalysisReport& r = a.report;
  r.source = frame.image_path;
  for (const auto& p : a.points) r.points.push_back({p.person_id, p.x, p.y});
  r.direction = {std::string(to_string(config.direction)), a.direction.dx, a.direction.dy};
  r.line = {std::string(to_string(a.line.spec.kind)), a.line.spec.degree, a.line.spec.lambda,
            a.line.coefficients, a.axes_swapped};
  r.ci = {config.band.level, std::string(to_string(config.band.mode)), a.ci.outlier_ids()};
  if (a.spring.otsu) r.spring.otsu_threshold = a.spring.otsu->threshold;
  r.spring.outliers = a.spring.outlier_ids();
  r.spring.scaled_forces = a.spring.scaled_forces();
  r.forces.k = a.field.k;
  for (const auto& l : a.field.links) r.forces.links.push_back({l.i, l.d, l.theta, l.magnitude});
  for (std::size_t i = 0; i < a.field.net.size(); ++i) {
    r.forces.net.push_back({a.field.person_ids[i], a.field.net[i].fx, a.field.net[i].fy,
                            a.field.net_magnitude[i]});
  }
  for (const auto& s : a.spring.people)
    r.colors.push_back({s.person_id, jet_color(s.scaled_force / 255.0)});
  r.warnings = std::move(warnings);
  return a;
}

PixelBuffer load_base_image(const PoseFrame& frame, const std::filesystem::path& search_dir,
                            Warnings* warnings)
{
  namespace fs = std::filesystem;
  if (frame.image_path.empty()) {
    warn(warnings, "no base image in keypoint file; rendering on a blank canvas");
    return PixelBuffer(frame.width, frame.height, kBlankCanvas);
  }
  fs::path path = frame.image_path;
  if (path.is_relative() && !search_dir.empty() && fs::exists(search_dir / path)) path = search_dir / path;
  if (!fs::exists(path)) {
    warn(warnings, "base image " + frame.image_path + " not found; rendering on a blank canvas");
    return PixelBuffer(frame.width, frame.height, kBlankCanvas);
  }
  PixelBuffer image = read_png(path);
  if (image.width() != frame.width || image.height() != frame.height) {
    warn(warnings, "base image is " + std::to_string(image.width()) + "x" +
                       std::to_string(image.height()) + " but keypoints declare " +
                       std::to_string(frame.width) + "x" + std::to_string(frame.height));
  }
  return image;
}

PixelBuffer render_analysis(const Analysis& a, const PixelBuffer& base, const StyleConfig& style)
{
  OverlayScene scene;
  scene.points = a.points;
  scene.direction = a.direction;
  scene.field = &a.field;
  scene.ci = &a.ci;
  scene.spring = &a.spring;
  return render_overlay(base, scene, style);
}

std::string render_analysis_topview(const Analysis& a) { return render_topview(a.topview, a.spring); }

AnalyzeOutputs analyze_to_dir(const PoseFrame& frame, Warnings warnings,
                              const std::filesystem::path& search_dir, const Config& config,
                              const std::filesystem::path& out_dir)
{
  const PixelBuffer base = load_base_image(frame, search_dir, &warnings);
  const Analysis analysis = analyze_frame(frame, config, std::move(warnings));

  std::filesystem::create_directories(out_dir);
  AnalyzeOutputs out{analysis.report, out_dir / "report.json", out_dir / "overlay.png",
                     out_dir / "topview.svg"};
  write_text(out.report_path, dump_report(analysis.report));
  write_png(out.overlay_path, render_analysis(analysis, base, config.style));
  write_text(out.topview_path, render_analysis_topview(analysis));
  return out;
}

AnalyzeOutputs analyze_file(const std::filesystem::path& keypoints, const Config& config,
                            const std::filesystem::path& out_dir)
{
  Warnings warnings;
  const PoseFrame frame = load_keypoint_file(keypoints, &warnings);
  return analyze_to_dir(frame, std::move(warnings), keypoints.parent_path(), config, out_dir);
}

}  // namespace massimo
