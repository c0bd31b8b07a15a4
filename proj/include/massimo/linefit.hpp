#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "massimo/common.hpp"
#include "massimo/ingest.hpp"

namespace massimo {

enum class ModelKind { linear, polynomial, ridge };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

/// Regression model selection. Ridge reuses `degree` (default 1) so a
/// penalised straight line and a penalised polynomial share one code path.
struct ModelSpec {
  ModelKind kind = ModelKind::linear;
  int degree = 1;
  double lambda = 0.0;

  static ModelSpec make_linear() { return {}; }
  static ModelSpec make_polynomial(int degree = 2) { return {ModelKind::polynomial, degree, 0.0}; }
  static ModelSpec make_ridge(double lambda = 1.0, int degree = 1)
  {
    return {ModelKind::ridge, degree, lambda};
  }

  /// Throws DomainError when the invariants do not hold.
  void validate() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// y = beta0 + beta1 x + ... + betan x^n in raw pixel coordinates.
struct FittedLine {
  ModelSpec spec;
  std::vector<double> coefficients;
  std::size_t n_points = 0;

  int degree() const noexcept { return static_cast<int>(coefficients.size()) - 1; }
};

struct ResidualStats {
  double sse = 0.0;
  double se = 0.0;  ///< sqrt(sse / (n - 2))
  int df = 0;       ///< n - 2
  double x_mean = 0.0;
  double sxx = 0.0;

  std::size_t n() const noexcept { return static_cast<std::size_t>(df) + 2; }
};

struct DirectionVector {
  double dx = 0.0;
  double dy = 0.0;

  double norm() const noexcept;
  Point2 unit() const noexcept;
};

struct TopViewPoint {
  double along = 0.0;
  double offset = 0.0;  ///< positive below the line (image y grows downward)
};

/// Least squares (plus intercept-free L2 penalty for ridge) via the normal
/// equations and a Cholesky factorisation. x is mapped to [-1,1] internally
/// and the coefficients are mapped back before returning.
///
/// Throws FitError when there are fewer points than coefficients and
/// DegenerateGeometryError when the x values cannot support the model
/// (all equal, or fewer distinct values than coefficients); the caller is
/// expected to retry with the axes swapped.
FittedLine fit_line(std::span<const QueuePoint> points, const ModelSpec& spec);

double predict(const FittedLine& line, double x);

ResidualStats residual_stats(const FittedLine& line, std::span<const QueuePoint> points);

/// Endpoint vector (last - first) of an ordered queue.
DirectionVector direction_vector(std::span<const QueuePoint> points);

/// Projects points into (along-axis, signed perpendicular offset) coordinates.
/// Degree-1 lines use the line itself anchored at (0, beta0); higher degrees
/// use the chord between the predictions at the first and last point.
std::vector<TopViewPoint> top_view(std::span<const QueuePoint> points, const FittedLine& line);

}  // namespace massimo
