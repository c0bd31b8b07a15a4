#include "massimo/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <charconv>
#include <string>

#include "bitmap_font.hpp"

namespace massimo {

namespace {

constexpr Rgb kLegendBackground{24, 24, 24};
constexpr Rgb kLegendText{240, 240, 240};
constexpr int kBoxPadding = 2;
constexpr int kBoxThickness = 2;

// Overlay layer kept as a list of writes. Later writes to a pixel win, so
// blending walks the list backwards and takes the first hit per pixel.
struct Layer {
  struct Write {
    std::uint32_t px;
    Rgb c;
  };

  int w, h;
  std::vector<Write> writes;

  int width() const { return w; }
  int height() const { return h; }

  void put(int x, int y, Rgb c)
  {
    if (x < 0 || y < 0 || x >= w || y >= h) return;
    writes.push_back({static_cast<std::uint32_t>(static_cast<std::size_t>(y) * w + x), c});
  }

  void fill_rect(int x0, int y0, int x1, int y1, Rgb c)
  {
    x0 = std::max(x0, 0);
    y0 = std::max(y0, 0);
    x1 = std::min(x1, w - 1);
    y1 = std::min(y1, h - 1);
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) put(x, y, c);
  }
};

struct Ellipse {
  double cx, cy;
  double a, b;  // semi-axes, a along the queue direction
  double cos_t, sin_t;

  double half_width() const { return std::sqrt(a * a * cos_t * cos_t + b * b * sin_t * sin_t); }
  double half_height() const { return std::sqrt(a * a * sin_t * sin_t + b * b * cos_t * cos_t); }
};

void fill_ellipse(Layer& layer, const Ellipse& e, Rgb c)
{
  const int x0 = static_cast<int>(std::floor(e.cx - e.half_width()));
  const int x1 = static_cast<int>(std::ceil(e.cx + e.half_width()));
  const int y0 = static_cast<int>(std::floor(e.cy - e.half_height()));
  const int y1 = static_cast<int>(std::ceil(e.cy + e.half_height()));
  for (int y = std::max(y0, 0); y <= std::min(y1, layer.height() - 1); ++y) {
    for (int x = std::max(x0, 0); x <= std::min(x1, layer.width() - 1); ++x) {
      const double dx = x - e.cx;
      const double dy = y - e.cy;
      const double u = (dx * e.cos_t + dy * e.sin_t) / e.a;
      const double v = (-dx * e.sin_t + dy * e.cos_t) / e.b;
      if (u * u + v * v <= 1.0) layer.put(x, y, c);
    }
  }
}

void draw_segment(Layer& layer, Point2 p, Point2 q, double half_width, Rgb c)
{
  const int x0 = static_cast<int>(std::floor(std::min(p.x, q.x) - half_width));
  const int x1 = static_cast<int>(std::ceil(std::max(p.x, q.x) + half_width));
  const int y0 = static_cast<int>(std::floor(std::min(p.y, q.y) - half_width));
  const int y1 = static_cast<int>(std::ceil(std::max(p.y, q.y) + half_width));
  const double vx = q.x - p.x;
  const double vy = q.y - p.y;
  const double len2 = vx * vx + vy * vy;
  for (int y = std::max(y0, 0); y <= std::min(y1, layer.height() - 1); ++y) {
    for (int x = std::max(x0, 0); x <= std::min(x1, layer.width() - 1); ++x) {
      const double wx = x - p.x;
      const double wy = y - p.y;
      const double t = len2 > 0.0 ? std::clamp((wx * vx + wy * vy) / len2, 0.0, 1.0) : 0.0;
      const double ex = wx - t * vx;
      const double ey = wy - t * vy;
      if (ex * ex + ey * ey <= half_width * half_width) layer.put(x, y, c);
    }
  }
}

void draw_box(Layer& layer, int x0, int y0, int x1, int y1, Rgb c)
{
  for (int k = 0; k < kBoxThickness; ++k) {
    layer.fill_rect(x0, y0 + k, x1, y0 + k, c);
    layer.fill_rect(x0, y1 - k, x1, y1 - k, c);
    layer.fill_rect(x0 + k, y0, x0 + k, y1, c);
    layer.fill_rect(x1 - k, y0, x1 - k, y1, c);
  }
}

void draw_legend(Layer& layer)
{
  constexpr int kScale = 2;
  constexpr int kMargin = 10;
  constexpr int kPad = 8;
  constexpr int kSwatch = detail::kGlyphHeight * kScale;
  constexpr int kRow = kSwatch + 6;
  constexpr double kStops[3] = {0.0, 0.5, 1.0};

  int text_w = 0;
  for (auto label : kLegendLabels) text_w = std::max(text_w, detail::text_width(label, kScale));
  const int w = kPad + kSwatch + kPad + text_w + kPad;
  const int h = kPad + 3 * kRow - 6 + kPad;
  layer.fill_rect(kMargin, kMargin, kMargin + w - 1, kMargin + h - 1, kLegendBackground);

  for (int row = 0; row < 3; ++row) {
    const int top = kMargin + kPad + row * kRow;
    const int left = kMargin + kPad;
    layer.fill_rect(left, top, left + kSwatch - 1, top + kSwatch - 1, jet_color(kStops[row]));
    const auto plot = [&](int px, int py) { layer.put(px, py, kLegendText); };
    detail::draw_text(plot, left + kSwatch + kPad, top, kLegendLabels[row], kScale);
  }
}

double median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Appends v with two decimals.
void put(std::string& out, double v)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  out.append(buf, res.ptr);
}

void put(std::string& out, long long v)
{
  char buf[24];
  out.append(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
}

void put_hex(std::string& out, Rgb c)
{
  static constexpr char kDigits[] = "0123456789abcdef";
  out += '#';
  for (std::uint8_t b : {c.r, c.g, c.b}) {
    out += kDigits[b >> 4];
    out += kDigits[b & 15];
  }
}

}  // namespace

void StyleConfig::validate() const
{
  if (!(overlay_alpha >= 0.0 && overlay_alpha <= 1.0))
    throw DomainError("overlay_alpha must lie in [0, 1]");
  if (!(ellipse_scale > 0.0)) throw DomainError("ellipse_scale must be > 0");
  if (line_width < 1) throw DomainError("line_width must be >= 1");
}

PixelBuffer render_overlay(const PixelBuffer& base, const OverlayScene& scene,
                           const StyleConfig& style)
{
  style.validate();
  if (base.empty()) throw RenderError("base image is empty");
  if (scene.points.empty()) return base;

  const std::size_t n = scene.points.size();
  if ((scene.spring && scene.spring->people.size() != n) || (scene.ci && scene.ci->people.size() != n) ||
      (scene.field && scene.field->net.size() != n)) {
    throw RenderError("overlay inputs disagree on the number of people");
  }

  Layer layer{base.width(), base.height(), {}};

  std::vector<double> link_lengths;
  std::vector<double> link_colour_values;
  if (scene.field) {
    for (const auto& l : scene.field->links)
      if (l.d > 0.0) link_lengths.push_back(l.d);
    link_colour_values = minmax_scale(per_link_magnitudes(*scene.field));
  }
  const double fallback = std::max(4.0, 0.02 * std::min(base.width(), base.height()));
  const double semi_major =
      std::max(2.0, link_lengths.empty() ? fallback : style.ellipse_scale * median(link_lengths));
  const double dir_norm = scene.direction.norm();
  const Point2 u = dir_norm > 0.0 ? scene.direction.unit() : Point2{1.0, 0.0};

  std::vector<Ellipse> ellipses;
  ellipses.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = scene.points[i];
    ellipses.push_back({p.x, p.y, semi_major, 0.5 * semi_major, u.x, u.y});
    const double level = scene.spring ? scene.spring->people[i].scaled_force / 255.0 : 0.0;
    fill_ellipse(layer, ellipses.back(), jet_color(level));
  }

  if (scene.field) {
    const double half_width = 0.5 * style.line_width;
    for (std::size_t k = 0; k < scene.field->links.size(); ++k) {
      const std::size_t i = scene.field->links[k].i;
      if (i + 1 >= n) continue;
      draw_segment(layer, scene.points[i].position(), scene.points[i + 1].position(), half_width,
                   jet_color(link_colour_values[k] / 255.0));
    }
  }

  if (scene.ci) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!scene.ci->people[i].is_outlier) continue;
      const Ellipse& e = ellipses[i];
      draw_box(layer, static_cast<int>(std::floor(e.cx - e.half_width())) - kBoxPadding,
               static_cast<int>(std::floor(e.cy - e.half_height())) - kBoxPadding,
               static_cast<int>(std::ceil(e.cx + e.half_width())) + kBoxPadding,
               static_cast<int>(std::ceil(e.cy + e.half_height())) + kBoxPadding,
               style.outlier_box_color);
    }
  }

  draw_legend(layer);

  PixelBuffer out = base;
  const double alpha = style.overlay_alpha;
  auto dst = out.bytes();
  std::vector<bool> done(static_cast<std::size_t>(base.width()) * base.height());
  for (auto it = layer.writes.rbegin(); it != layer.writes.rend(); ++it) {
    if (done[it->px]) continue;
    done[it->px] = true;
    const std::uint8_t src[3] = {it->c.r, it->c.g, it->c.b};
    for (std::size_t c = 0; c < 3; ++c) {
      const std::size_t i = static_cast<std::size_t>(it->px) * 3 + c;
      const double v = (1.0 - alpha) * dst[i] + alpha * src[c];
      dst[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  return out;
}

std::string render_topview(std::span<const TopViewPoint> projected, const SpringFlags& spring)
{
  constexpr double kWidth = 800.0;
  constexpr double kHeight = 400.0;
  constexpr double kMargin = 40.0;
  constexpr int kGridLines = 3;

  double lo = 0.0, hi = 0.0, max_offset = 0.0;
  if (!projected.empty()) {
    lo = hi = projected.front().along;
    for (const auto& p : projected) {
      lo = std::min(lo, p.along);
      hi = std::max(hi, p.along);
      max_offset = std::max(max_offset, std::abs(p.offset));
    }
  }
  const double mid = 0.5 * (lo + hi);
  double scale = 1.0;
  if (hi > lo) scale = (kWidth - 2.0 * kMargin) / (hi - lo);
  if (max_offset > 0.0) scale = std::min(scale, (0.5 * kHeight - kMargin) / max_offset);
  const double cx = 0.5 * kWidth;
  const double cy = 0.5 * kHeight;

  std::string svg;
  svg.reserve(256 + 96 * projected.size());
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"400\" viewBox=\"0 0 800 400\">\n";
  svg += "  <rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  svg += "  <text x=\"40\" y=\"20\" font-family=\"sans-serif\" font-size=\"12\">top view (along, offset) px</text>\n";

  const auto axis_line = [&](double y) {
    svg += "  <line x1=\"40\" y1=\"";
    put(svg, y);
    svg += "\" x2=\"760\" y2=\"";
    put(svg, y);
    svg += '"';
  };
  const double grid_step = (0.5 * kHeight - kMargin) / kGridLines;
  for (int g = 1; g <= kGridLines; ++g) {
    for (int sign : {-1, 1}) {
      const double y = cy + sign * g * grid_step;
      axis_line(y);
      svg += " stroke=\"#dddddd\" stroke-dasharray=\"4 4\"/>\n  <text x=\"4\" y=\"";
      put(svg, y + 4);
      svg += "\" font-family=\"sans-serif\" font-size=\"10\">";
      put(svg, sign * g * grid_step / scale);
      svg += "</text>\n";
    }
  }
  axis_line(cy);
  svg += " stroke=\"#333333\" stroke-width=\"2\"/>\n";

  for (std::size_t i = 0; i < projected.size(); ++i) {
    const double level = i < spring.people.size() ? spring.people[i].scaled_force / 255.0 : 0.0;
    svg += "  <circle cx=\"";
    put(svg, cx + (projected[i].along - mid) * scale);
    svg += "\" cy=\"";
    put(svg, cy + projected[i].offset * scale);
    svg += "\" r=\"6\" fill=\"";
    put_hex(svg, jet_color(level));
    svg += "\" stroke=\"#000000\"";
    if (i < spring.people.size()) {
      svg += " data-person=\"";
      put(svg, static_cast<long long>(spring.people[i].person_id));
      svg += '"';
    }
    svg += "/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace massimo
