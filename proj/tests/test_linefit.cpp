#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "massimo/linefit.hpp"
#include "regression_oracle.hpp"
#include "test_support.hpp"

using namespace massimo;
using massimo::test::make_points;

TEST_CASE("worked linear example")
{
  const auto pts = make_points({{0, 0}, {1, 2}, {2, 3}, {3, 5}});
  const FittedLine line = fit_line(pts, ModelSpec::make_linear());
  REQUIRE(line.coefficients.size() == 2);
  CHECK(std::fabs(line.coefficients[0] - 0.1) <= 1e-12);
  CHECK(std::fabs(line.coefficients[1] - 1.6) <= 1e-12);
  CHECK(predict(line, 2.0) == doctest::Approx(3.3).epsilon(1e-12));

  const ResidualStats s = residual_stats(line, pts);
  CHECK(s.sse == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(s.se == doctest::Approx(std::sqrt(0.1)).epsilon(1e-12));
  CHECK(s.df == 2);
  CHECK(s.x_mean == doctest::Approx(1.5));
  CHECK(s.sxx == doctest::Approx(5.0));
}

TEST_CASE("exact fits")
{
  const auto line_pts = make_points({{0, 1}, {1, 3}, {2, 5}, {5, 11}});
  const FittedLine l = fit_line(line_pts, ModelSpec::make_linear());
  CHECK(l.coefficients[0] == doctest::Approx(1.0));
  CHECK(l.coefficients[1] == doctest::Approx(2.0));
  CHECK(residual_stats(l, line_pts).sse == doctest::Approx(0.0));
  CHECK(predict(l, 3.0) == doctest::Approx(7.0));

  const auto par = make_points({{0, 0}, {1, 1}, {2, 4}, {3, 9}});
  const FittedLine p = fit_line(par, ModelSpec::make_polynomial(2));
  REQUIRE(p.coefficients.size() == 3);
  CHECK(std::fabs(p.coefficients[0]) < 1e-12);
  CHECK(std::fabs(p.coefficients[1]) < 1e-12);
  CHECK(p.coefficients[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(predict(p, 4.0) == doctest::Approx(16.0));
}

TEST_CASE("ridge with zero penalty equals least squares")
{
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pts = test::random_queue(rng, 12);
    const FittedLine ols = fit_line(pts, ModelSpec::make_linear());
    const FittedLine ridge = fit_line(pts, ModelSpec::make_ridge(0.0, 1));
    for (int j = 0; j < 2; ++j)
      CHECK(std::fabs(ols.coefficients[j] - ridge.coefficients[j]) <=
            1e-12 * std::max(1.0, std::fabs(ols.coefficients[j])));
  }
}

TEST_CASE("ridge slope norm shrinks as the penalty grows")
{
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    auto pts = test::random_queue(rng, 15);
    for (auto& p : pts) p.y += 0.3 * p.x;  // give the slope something to shrink
    const int degree = 1 + trial % 3;
    double previous = HUGE_VAL;
    for (double lambda : {0.0, 0.1, 1.0, 10.0, 100.0, 1e3, 1e4, 1e5, 1e6}) {
      const FittedLine f = fit_line(pts, ModelSpec::make_ridge(lambda, degree));
      double norm = 0.0;
      for (int j = 1; j <= degree; ++j) norm += f.coefficients[j] * f.coefficients[j];
      CHECK(norm <= previous * (1 + 1e-9));
      previous = norm;
    }
  }
}

TEST_CASE("coefficients match the normal-equations oracle")
{
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> xs(0.0, 20.0), noise(-3.0, 3.0), coef(-2.0, 2.0);
  std::uniform_int_distribution<int> count(5, 40), deg(1, 3), kind(0, 2);
  for (int trial = 0; trial < 500; ++trial) {
    const int k = kind(rng);
    const int degree = k == 0 ? 1 : deg(rng);
    const double lambda = k == 2 ? std::pow(10.0, coef(rng) * 2.0) : 0.0;
    std::vector<double> truth(degree + 1);
    for (auto& c : truth) c = coef(rng);
    std::vector<QueuePoint> pts;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      const double x = xs(rng);
      const double y = noise(rng);
      double poly = 0.0;
      for (int j = degree; j >= 0; --j) poly = poly * x + truth[j];
      pts.push_back({i, x, poly + y});
    }
    const ModelSpec spec = k == 0 ? ModelSpec::make_linear()
                           : k == 1 ? ModelSpec::make_polynomial(degree)
                                    : ModelSpec::make_ridge(lambda, degree);
    const FittedLine f = fit_line(pts, spec);
    const auto oracle = test::normal_equations_oracle(pts, degree, lambda);
    INFO("trial " << trial << " kind " << k << " degree " << degree);
    CHECK(test::max_rel_error(f.coefficients, oracle) <= 1e-9);
  }
}

TEST_CASE("least-squares residuals are orthogonal to the design columns")
{
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int degree = 1 + trial % 3;
    const auto pts = test::random_queue(rng, 20);
    const FittedLine f = fit_line(pts, degree == 1 ? ModelSpec::make_linear() : ModelSpec::make_polynomial(degree));
    // Centre x so the moments stay well scaled.
    double xm = 0.0;
    for (const auto& p : pts) xm += p.x;
    xm /= static_cast<double>(pts.size());
    for (int k = 0; k <= degree; ++k) {
      double dot = 0.0, scale = 0.0;
      for (const auto& p : pts) {
        const double e = p.y - predict(f, p.x);
        const double xk = std::pow(p.x - xm, k);
        dot += e * xk;
        scale += std::fabs(p.y * xk);
      }
      CHECK(std::fabs(dot) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("fit does not depend on point order")
{
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    auto pts = test::random_queue(rng, 10);
    const ModelSpec spec = trial % 2 ? ModelSpec::make_polynomial(2) : ModelSpec::make_ridge(3.0, 1);
    const FittedLine a = fit_line(pts, spec);
    std::shuffle(pts.begin(), pts.end(), rng);
    const FittedLine b = fit_line(pts, spec);
    for (std::size_t j = 0; j < a.coefficients.size(); ++j)
      CHECK(std::fabs(a.coefficients[j] - b.coefficients[j]) <= 1e-12 * std::max(1.0, std::fabs(a.coefficients[j])));
  }
}

TEST_CASE("fit errors")
{
  CHECK_THROWS_AS(fit_line(make_points({{1, 1}}), ModelSpec::make_linear()), FitError);
  CHECK_THROWS_AS(fit_line(make_points({{0, 0}, {1, 1}}), ModelSpec::make_polynomial(2)), FitError);
  CHECK_THROWS_AS(fit_line(make_points({{5, 0}, {5, 1}, {5, 3}}), ModelSpec::make_linear()),
                  DegenerateGeometryError);
  CHECK_THROWS_AS(residual_stats(fit_line(make_points({{0, 0}, {1, 1}}), ModelSpec::make_linear()),
                                 make_points({{0, 0}, {1, 1}})),
                  InsufficientDataError);
  CHECK_THROWS_AS((ModelSpec{ModelKind::linear, 2, 0.0}.validate()), DomainError);
  CHECK_THROWS_AS(ModelSpec::make_ridge(-1.0).validate(), DomainError);
  CHECK_THROWS_AS(ModelSpec::make_polynomial(0).validate(), DomainError);
}

TEST_CASE("direction vector")
{
  const DirectionVector d = direction_vector(make_points({{0, 0}, {3, 1}, {10, 2}}));
  CHECK(d.dx == 10.0);
  CHECK(d.dy == 2.0);
  const DirectionVector three = direction_vector(make_points({{0, 0}, {4, 1}, {8, 2}}));
  CHECK(three.dx == 8.0);
  CHECK(three.dy == 2.0);
  CHECK_THROWS_AS(direction_vector(make_points({{5, 5}, {5, 5}})), DegenerateGeometryError);
  CHECK_THROWS_AS(direction_vector(make_points({{5, 5}})), DegenerateGeometryError);
}

TEST_CASE("top view projection")
{
  SUBCASE("points on the line have zero offset")
  {
    const auto pts = make_points({{0, 1}, {2, 2}, {4, 3}});
    const FittedLine f = fit_line(pts, ModelSpec::make_linear());
    for (const auto& t : top_view(pts, f)) CHECK(std::fabs(t.offset) < 1e-9);
  }
  SUBCASE("offset sign: positive below the line")
  {
    const FittedLine flat{ModelSpec::make_linear(), {0.0, 0.0}, 2};
    const auto tv = top_view(make_points({{3, -5}, {4, 5}}), flat);
    CHECK(tv[0].offset == doctest::Approx(-5.0));
    CHECK(tv[1].offset == doctest::Approx(5.0));
    CHECK(tv[0].along == doctest::Approx(3.0));
  }
  SUBCASE("diagonal line rotates by 45 degrees")
  {
    const FittedLine diag{ModelSpec::make_linear(), {0.0, 1.0}, 2};
    const auto tv = top_view(make_points({{0, std::sqrt(2.0)}}), diag);
    CHECK(tv[0].offset == doctest::Approx(1.0));
    CHECK(tv[0].along == doctest::Approx(1.0));
  }
  SUBCASE("the fitted line's own predictions project onto the axis")
  {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      auto pts = test::random_queue(rng, 8);
      const FittedLine f = fit_line(pts, ModelSpec::make_linear());
      for (auto& p : pts) p.y = predict(f, p.x);
      for (const auto& t : top_view(pts, f)) CHECK(std::fabs(t.offset) < 1e-9);
    }
  }
}
