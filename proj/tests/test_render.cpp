#include <doctest.h>

#include <cmath>
#include <regex>
#include <string>

#include "massimo/image_io.hpp"
#include "massimo/render.hpp"
#include "test_support.hpp"

using namespace massimo;
using massimo::test::make_points;

namespace {

PixelBuffer gradient(int w, int h)
{
  PixelBuffer img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      img.set(x, y, {static_cast<std::uint8_t>(x % 256), static_cast<std::uint8_t>(y % 256), 77});
  return img;
}

std::vector<double> svg_attr(const std::string& svg, const std::string& attr)
{
  std::vector<double> out;
  const std::regex re("<circle cx=\"([-0-9.]+)\" cy=\"([-0-9.]+)\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it)
    out.push_back(std::stod((*it)[attr == "cx" ? 1 : 2]));
  return out;
}

}  // namespace

TEST_CASE("jet endpoints")
{
  CHECK(jet_color(0.0) == Rgb{0, 0, 128});
  CHECK(jet_color(1.0) == Rgb{128, 0, 0});
  CHECK(jet_color(0.5) == Rgb{128, 255, 128});
  CHECK(jet_color(-3.0) == jet_color(0.0));
  CHECK(jet_color(7.0) == jet_color(1.0));
}

TEST_CASE("jet ramps")
{
  // Red climbs from 0.5 and saturates until 0.875; blue mirrors it.
  for (int i = 500; i < 875; ++i) CHECK(jet_color(i / 1000.0).r <= jet_color((i + 1) / 1000.0).r);
  for (int i = 125; i < 500; ++i) CHECK(jet_color(i / 1000.0).b >= jet_color((i + 1) / 1000.0).b);
  for (int i = 0; i <= 1000; ++i) {
    const Rgb a = jet_color(i / 1000.0), b = jet_color((1000 - i) / 1000.0);
    CHECK(std::abs(a.r - b.b) <= 1);  // half-up rounding is not mirror symmetric
    CHECK(std::abs(a.g - b.g) <= 1);
  }
}

TEST_CASE("style validation")
{
  StyleConfig s;
  s.overlay_alpha = 1.5;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s = {};
  s.ellipse_scale = 0;
  CHECK_THROWS_AS(s.validate(), DomainError);
}

TEST_CASE("no people leaves the base image untouched")
{
  const PixelBuffer base = gradient(64, 48);
  OverlayScene scene;
  CHECK(render_overlay(base, scene, StyleConfig{}) == base);
}

TEST_CASE("zero alpha leaves the base image untouched")
{
  const PixelBuffer base = gradient(200, 120);
  const auto pts = make_points({{40, 60}, {100, 70}, {160, 60}});
  const ForceField field = chain_forces(pts, direction_vector(pts), {1.0});
  const SpringFlags spring = flag_force_outliers(field);
  const FittedLine line = fit_line(pts, ModelSpec::make_linear());
  const CiFlags ci = flag_ci_outliers(pts, line, residual_stats(line, pts), BandSpec{});
  OverlayScene scene{pts, direction_vector(pts), &field, &ci, &spring};
  StyleConfig style;
  style.overlay_alpha = 0.0;
  CHECK(render_overlay(base, scene, style) == base);
  style.overlay_alpha = 0.45;
  const PixelBuffer a = render_overlay(base, scene, style);
  CHECK(a == render_overlay(base, scene, style));
  CHECK_FALSE(a == base);
}

TEST_CASE("one still person is a blue ellipse")
{
  const PixelBuffer base(120, 120, {200, 200, 200});
  const auto pts = make_points({{80, 80}});
  const ForceField field = chain_forces(pts, {1, 0}, {1.0});
  const SpringFlags spring = flag_force_outliers(field);
  OverlayScene scene{pts, {1, 0}, &field, nullptr, &spring};
  StyleConfig style;
  style.overlay_alpha = 1.0;
  const PixelBuffer out = render_overlay(base, scene, style);
  CHECK(out.at(80, 80) == jet_color(0.0));
  CHECK(out.at(119, 119) == Rgb{200, 200, 200});
}

TEST_CASE("blend arithmetic")
{
  const PixelBuffer base(120, 120, {200, 100, 0});
  const auto pts = make_points({{80, 80}});
  const ForceField field = chain_forces(pts, {1, 0}, {1.0});
  const SpringFlags spring = flag_force_outliers(field);
  OverlayScene scene{pts, {1, 0}, &field, nullptr, &spring};
  StyleConfig style;
  style.overlay_alpha = 0.25;
  const Rgb o = jet_color(0.0);
  const Rgb got = render_overlay(base, scene, style).at(80, 80);
  CHECK(got.r == std::lround(0.75 * 200 + 0.25 * o.r));
  CHECK(got.g == std::lround(0.75 * 100 + 0.25 * o.g));
  CHECK(got.b == std::lround(0.75 * 0 + 0.25 * o.b));
}

TEST_CASE("png round trip")
{
  const PixelBuffer img = gradient(33, 17);
  CHECK(decode_png(encode_png(img)) == img);
  const std::vector<std::uint8_t> junk{1, 2, 3, 4, 5, 6, 7, 8, 9};
  CHECK_THROWS_AS(decode_png(junk), RenderError);
  CHECK_THROWS_AS(read_png("/nonexistent/nowhere.png"), RenderError);
}

TEST_CASE("top view svg")
{
  SUBCASE("offsets of zero sit on the axis")
  {
    const std::vector<TopViewPoint> tv{{0, 0}, {50, 0}, {100, 0}};
    SpringFlags spring;
    const std::string svg = render_topview(tv, spring);
    const auto cy = svg_attr(svg, "cy");
    REQUIRE(cy.size() == 3);
    CHECK(cy[0] == cy[1]);
    CHECK(cy[1] == cy[2]);
    CHECK(svg == render_topview(tv, spring));
  }
  SUBCASE("single person is centred")
  {
    const std::vector<TopViewPoint> tv{{42, 0}};
    const std::string svg = render_topview(tv, SpringFlags{});
    CHECK(svg_attr(svg, "cx") == std::vector<double>{400});
    CHECK(svg_attr(svg, "cy") == std::vector<double>{200});
  }
  SUBCASE("bulge shows a displaced, warmer middle circle")
  {
    const auto pts = make_points({{0, 0}, {5, 4}, {10, 0}});
    const ForceField field = chain_forces(pts, direction_vector(pts), {1.0});
    const SpringFlags spring = flag_force_outliers(field);
    const FittedLine flat{ModelSpec::make_linear(), {0.0, 0.0}, 3};
    const std::string svg = render_topview(top_view(pts, flat), spring);
    const auto cy = svg_attr(svg, "cy");
    REQUIRE(cy.size() == 3);
    CHECK(cy[1] > cy[0]);
    CHECK(cy[0] == cy[2]);
    CHECK(jet_color(spring.people[1].scaled_force / 255).r > jet_color(spring.people[0].scaled_force / 255).r);
    CHECK(svg.find("data-person=\"1\"") != std::string::npos);
  }
}
