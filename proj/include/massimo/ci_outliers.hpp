#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "massimo/ingest.hpp"
#include "massimo/linefit.hpp"

namespace massimo {

enum class BandMode {
  constant,    ///< half-width t * se everywhere
  prediction,  ///< half-width t * se * sqrt(1 + 1/n + (x - x_mean)^2 / sxx)
};

std::string_view to_string(BandMode mode);
BandMode band_mode_from_string(std::string_view name);

struct BandSpec {
  double level = 0.95;
  BandMode mode = BandMode::constant;

  void validate() const;

  friend bool operator==(const BandSpec&, const BandSpec&) = default;
};

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// CDF of Student's t with `df` degrees of freedom.
double student_t_cdf(double t, int df);

/// Two-sided critical value: the (1 + level) / 2 quantile of Student's t.
/// Throws DomainError for df < 1 or level outside (0, 1).
double t_critical(int df, double level);

struct Band {
  double lower = 0.0;
  double upper = 0.0;
};

Band confidence_band(const FittedLine& line, const ResidualStats& stats, double x,
                     const BandSpec& band);

struct CiFlag {
  int person_id = 0;
  double predicted = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool is_outlier = false;
};

struct CiFlags {
  BandSpec band;
  std::vector<CiFlag> people;

  std::size_t outlier_count() const;
  std::vector<int> outlier_ids() const;
};

/// Flags every point whose y lies strictly outside its band (boundary is inside).
CiFlags flag_ci_outliers(std::span<const QueuePoint> points, const FittedLine& line,
                         const ResidualStats& stats, const BandSpec& band);

}  // namespace massimo
