#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "massimo/ci_outliers.hpp"
#include "massimo/linefit.hpp"
#include "massimo/springs.hpp"
#include "massimo/threshold.hpp"

namespace massimo {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Piecewise-linear jet: channel = 255 * clamp(1.5 - |4v - c|, 0, 1) with
/// c = 3, 2, 1 for r, g, b, rounded half up. v is clamped to [0, 1].
Rgb jet_color(double v);

struct StyleConfig {
  double overlay_alpha = 0.45;
  double ellipse_scale = 0.35;  ///< semi-major axis as a fraction of the median link length
  int line_width = 3;
  Rgb outlier_box_color{255, 0, 0};

  void validate() const;

  friend bool operator==(const StyleConfig&, const StyleConfig&) = default;
};

/// Row-major 8-bit RGB image.
class PixelBuffer {
 public:
  PixelBuffer() = default;
  PixelBuffer(int width, int height, Rgb fill = {});

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return pixels_.empty(); }
  bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);

  std::span<const std::uint8_t> bytes() const noexcept { return pixels_; }
  std::span<std::uint8_t> bytes() noexcept { return pixels_; }

  friend bool operator==(const PixelBuffer&, const PixelBuffer&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Everything the overlay needs, in queue order. `ci` and `spring` must list
/// the people in the same order as `points`.
struct OverlayScene {
  std::span<const QueuePoint> points;
  DirectionVector direction{1.0, 0.0};
  const ForceField* field = nullptr;
  const CiFlags* ci = nullptr;
  const SpringFlags* spring = nullptr;
};

/// Draws person ellipses (net-force colour), link segments (link-magnitude
/// colour), boxes around CI outliers and the legend onto an overlay layer,
/// then blends the touched pixels into `base` with `style.overlay_alpha`.
/// With no people the base image is returned unchanged.
PixelBuffer render_overlay(const PixelBuffer& base, const OverlayScene& scene,
                           const StyleConfig& style);

/// SVG plot of the top view: axis horizontal, one circle per person at
/// (along, offset) centred on the along-range midpoint.
std::string render_topview(std::span<const TopViewPoint> projected, const SpringFlags& spring);

inline constexpr std::string_view kLegendLabels[3] = {"blue: aligned", "green/yellow: moderate",
                                                      "red: misaligned"};

}  // namespace massimo
