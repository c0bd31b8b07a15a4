#include <algorithm>
#include <cmath>

#include "massimo/render.hpp"

namespace massimo {

namespace {

std::uint8_t ramp(double v, double centre)
{
  const double level = std::clamp(1.5 - std::abs(4.0 * v - centre), 0.0, 1.0);
  return static_cast<std::uint8_t>(std::floor(255.0 * level + 0.5));
}

}  // namespace

Rgb jet_color(double v)
{
  v = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
  return {ramp(v, 3.0), ramp(v, 2.0), ramp(v, 1.0)};
}

}  // namespace massimo
