#include "massimo/linefit.hpp"

#include <algorithm>
#include <cmath>

namespace massimo {

namespace {

using Matrix = std::vector<std::vector<double>>;

double binomial(int n, int k)
{
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// In-place LL^T. Returns false when A is not numerically positive definite.
bool cholesky(Matrix& a)
{
  const std::size_t m = a.size();
  double scale = 0.0;
  for (std::size_t i = 0; i < m; ++i) scale = std::max(scale, std::abs(a[i][i]));
  const double tiny = scale * 1e-14;

  for (std::size_t j = 0; j < m; ++j) {
    double diag = a[j][j];
    for (std::size_t k = 0; k < j; ++k) diag -= a[j][k] * a[j][k];
    if (!(diag > tiny)) return false;
    a[j][j] = std::sqrt(diag);
    for (std::size_t i = j + 1; i < m; ++i) {
      double v = a[i][j];
      for (std::size_t k = 0; k < j; ++k) v -= a[i][k] * a[j][k];
      a[i][j] = v / a[j][j];
    }
  }
  return true;
}

std::vector<double> cholesky_solve(const Matrix& l, std::vector<double> b)
{
  const std::size_t m = l.size();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= l[i][k] * b[k];
    b[i] /= l[i][i];
  }
  for (std::size_t i = m; i-- > 0;) {
    for (std::size_t k = i + 1; k < m; ++k) b[i] -= l[k][i] * b[k];
    b[i] /= l[i][i];
  }
  return b;
}

}  // namespace

std::string_view to_string(ModelKind kind)
{
  switch (kind) {
    case ModelKind::linear: return "linear";
    case ModelKind::polynomial: return "polynomial";
    case ModelKind::ridge: return "ridge";
  }
  return "linear";
}

ModelKind model_kind_from_string(std::string_view name)
{
  if (name == "linear") return ModelKind::linear;
  if (name == "polynomial") return ModelKind::polynomial;
  if (name == "ridge") return ModelKind::ridge;
  throw DomainError("unknown model kind \"" + std::string(name) + "\"");
}

void ModelSpec::validate() const
{
  if (degree < 1) throw DomainError("model degree must be >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("ridge lambda must be >= 0");
  if (kind == ModelKind::linear && (degree != 1 || lambda != 0.0))
    throw DomainError("linear model requires degree 1 and lambda 0");
  if (kind == ModelKind::polynomial && lambda != 0.0)
    throw DomainError("polynomial model takes no lambda");
}

double DirectionVector::norm() const noexcept { return std::hypot(dx, dy); }

Point2 DirectionVector::unit() const noexcept
{
  const double n = norm();
  return {dx / n, dy / n};
}

FittedLine fit_line(std::span<const QueuePoint> points, const ModelSpec& spec)
{
  spec.validate();
  const std::size_t m = static_cast<std::size_t>(spec.degree) + 1;
  const std::size_t n = points.size();
  if (n < m) {
    throw FitError("underdetermined fit: " + std::to_string(m) + " coefficients need at least " +
                   std::to_string(m) + " points, got " + std::to_string(n));
  }

  // Sorted copy: accumulation order, and therefore every rounding step, is
  // independent of the caller's point order.
  std::vector<Point2> pts;
  pts.reserve(n);
  for (const auto& p : points) pts.push_back(p.position());
  std::sort(pts.begin(), pts.end(),
            [](const Point2& a, const Point2& b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });

  const double xmin = pts.front().x;
  const double xmax = pts.back().x;
  const double span = xmax - xmin;
  if (!(span > 1e-12 * std::max({1.0, std::abs(xmin), std::abs(xmax)}))) {
    throw DegenerateGeometryError(
        "degenerate geometry: all x values are identical (vertical queue); swap axes and refit");
  }
  const double centre = 0.5 * (xmin + xmax);
  const double half = 0.5 * span;

  Matrix a(m, std::vector<double>(m, 0.0));
  std::vector<double> b(m, 0.0);
  std::vector<double> powers(2 * m - 1);
  for (const auto& p : pts) {
    const double u = (p.x - centre) / half;
    powers[0] = 1.0;
    for (std::size_t k = 1; k < powers.size(); ++k) powers[k] = powers[k - 1] * u;
    for (std::size_t i = 0; i < m; ++i) {
      b[i] += powers[i] * p.y;
      for (std::size_t j = 0; j <= i; ++j) a[i][j] += powers[i + j];
    }
  }

  // raw = T * scaled, T[r][j] = C(j, r) (-centre)^(j-r) / half^j
  Matrix t(m, std::vector<double>(m, 0.0));
  for (std::size_t j = 0; j < m; ++j) {
    const double inv = std::pow(half, -static_cast<double>(j));
    for (std::size_t r = 0; r <= j; ++r) {
      t[r][j] = binomial(static_cast<int>(j), static_cast<int>(r)) *
                std::pow(-centre, static_cast<double>(j - r)) * inv;
    }
  }

  if (spec.lambda > 0.0) {
    // lambda * sum_{r>=1} raw_r^2 expressed in the scaled basis: lambda * T' P T.
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double acc = 0.0;
        for (std::size_t r = 1; r < m; ++r) acc += t[r][i] * t[r][j];
        a[i][j] += spec.lambda * acc;
      }
    }
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) a[i][j] = a[j][i];

  if (!cholesky(a)) {
    throw DegenerateGeometryError(
        "degenerate geometry: design matrix is singular (too few distinct x values); swap axes "
        "and refit");
  }
  const std::vector<double> scaled = cholesky_solve(a, std::move(b));

  FittedLine line;
  line.spec = spec;
  line.n_points = n;
  line.coefficients.assign(m, 0.0);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t j = r; j < m; ++j) line.coefficients[r] += t[r][j] * scaled[j];
  return line;
}

double predict(const FittedLine& line, double x)
{
  double acc = 0.0;
  for (auto it = line.coefficients.rbegin(); it != line.coefficients.rend(); ++it) acc = acc * x + *it;
  return acc;
}

ResidualStats residual_stats(const FittedLine& line, std::span<const QueuePoint> points)
{
  const std::size_t n = points.size();
  if (n < 3) {
    throw InsufficientDataError("residual statistics need at least 3 points (df = n - 2), got " +
                                std::to_string(n));
  }
  ResidualStats s;
  for (const auto& p : points) {
    const double e = p.y - predict(line, p.x);
    s.sse += e * e;
    s.x_mean += p.x;
  }
  s.x_mean /= static_cast<double>(n);
  for (const auto& p : points) s.sxx += (p.x - s.x_mean) * (p.x - s.x_mean);
  s.df = static_cast<int>(n) - 2;
  s.se = std::sqrt(s.sse / s.df);
  return s;
}

DirectionVector direction_vector(std::span<const QueuePoint> points)
{
  if (points.size() < 2)
    throw DegenerateGeometryError("direction vector needs at least 2 points");
  DirectionVector v{points.back().x - points.front().x, points.back().y - points.front().y};
  if (v.dx == 0.0 && v.dy == 0.0)
    throw DegenerateGeometryError("degenerate geometry: first and last queue points coincide");
  return v;
}

std::vector<TopViewPoint> top_view(std::span<const QueuePoint> points, const FittedLine& line)
{
  std::vector<TopViewPoint> out;
  if (points.empty()) return out;

  Point2 anchor;
  Point2 axis;
  if (line.degree() == 1) {
    anchor = {0.0, line.coefficients[0]};
    const double len = std::hypot(1.0, line.coefficients[1]);
    axis = {1.0 / len, line.coefficients[1] / len};
  } else {
    const double x0 = points.front().x;
    const double x1 = points.back().x;
    anchor = {x0, predict(line, x0)};
    const double dx = x1 - x0;
    const double dy = predict(line, x1) - anchor.y;
    const double len = std::hypot(dx, dy);
    axis = len > 0.0 ? Point2{dx / len, dy / len} : Point2{1.0, 0.0};
    if (std::abs(axis.x) >= std::abs(axis.y) ? axis.x < 0.0 : axis.y < 0.0)
      axis = {-axis.x, -axis.y};
  }
  const Point2 normal{-axis.y, axis.x};

  out.reserve(points.size());
  for (const auto& p : points) {
    const double rx = p.x - anchor.x;
    const double ry = p.y - anchor.y;
    out.push_back({rx * axis.x + ry * axis.y, rx * normal.x + ry * normal.y});
  }
  return out;
}

}  // namespace massimo
