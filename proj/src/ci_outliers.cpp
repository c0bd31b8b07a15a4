#include "massimo/ci_outliers.hpp"

#include <cmath>
#include <string>

namespace massimo {

namespace {

double band_se(const ResidualStats& stats, double x, BandMode mode)
{
  if (mode == BandMode::constant) return stats.se;
  const double n = static_cast<double>(stats.n());
  const double dx = x - stats.x_mean;
  return stats.se * std::sqrt(1.0 + 1.0 / n + dx * dx / stats.sxx);
}

}  // namespace

std::string_view to_string(BandMode mode)
{
  return mode == BandMode::prediction ? "prediction" : "constant";
}

BandMode band_mode_from_string(std::string_view name)
{
  if (name == "constant") return BandMode::constant;
  if (name == "prediction") return BandMode::prediction;
  throw DomainError("unknown band mode \"" + std::string(name) + "\"");
}

void BandSpec::validate() const
{
  if (!(level > 0.0 && level < 1.0)) throw DomainError("band level must lie in (0, 1)");
}

Band confidence_band(const FittedLine& line, const ResidualStats& stats, double x,
                     const BandSpec& band)
{
  band.validate();
  if (stats.df < 1) throw InsufficientDataError("confidence band needs df >= 1");

  const double half = t_critical(stats.df, band.level) * band_se(stats, x, band.mode);
  const double yhat = predict(line, x);
  return {yhat - half, yhat + half};
}

std::size_t CiFlags::outlier_count() const
{
  std::size_t count = 0;
  for (const auto& p : people) count += p.is_outlier ? 1 : 0;
  return count;
}

std::vector<int> CiFlags::outlier_ids() const
{
  std::vector<int> ids;
  for (const auto& p : people)
    if (p.is_outlier) ids.push_back(p.person_id);
  return ids;
}

CiFlags flag_ci_outliers(std::span<const QueuePoint> points, const FittedLine& line,
                         const ResidualStats& stats, const BandSpec& band)
{
  band.validate();
  if (stats.df < 1) throw InsufficientDataError("confidence band needs df >= 1");

  const double t = t_critical(stats.df, band.level);

  CiFlags flags;
  flags.band = band;
  flags.people.reserve(points.size());
  for (const auto& p : points) {
    const double half = t * band_se(stats, p.x, band.mode);
    const double yhat = predict(line, p.x);
    CiFlag f{p.person_id, yhat, yhat - half, yhat + half, false};
    f.is_outlier = p.y < f.lower || p.y > f.upper;
    flags.people.push_back(f);
  }
  return flags;
}

}  // namespace massimo
