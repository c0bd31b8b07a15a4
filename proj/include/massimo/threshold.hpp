#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "massimo/common.hpp"
#include "massimo/springs.hpp"

namespace massimo {

inline constexpr int kHistogramBins = 256;

/// (v - min) / (max - min) * 255; all zeros (with a warning) when max == min.
std::vector<double> minmax_scale(std::span<const double> values, Warnings* warnings = nullptr);

/// floor(v) clamped to [0, 255].
int histogram_bin(double scaled);

struct OtsuResult {
  int threshold = 0;  ///< lower class is {bin <= threshold}
  std::array<double, 2> class_probs{};
  std::array<double, 2> class_vars{};  ///< population variances of the bin values
  double intra_class_variance = 0.0;
  double between_class_variance = 0.0;
};

/// Exhaustive scan over t in {0..254} minimising the intra-class variance of
/// the 256-bin histogram; the smallest t wins ties. Candidates are compared
/// as exact rationals so the choice never depends on rounding. Returns
/// nullopt when fewer than two bins are occupied (no admissible split).
std::optional<OtsuResult> otsu_threshold(std::span<const double> scaled);

struct SpringFlag {
  int person_id = 0;
  double scaled_force = 0.0;
  bool is_outlier = false;
};

struct SpringFlags {
  std::optional<OtsuResult> otsu;  ///< nullopt: degenerate distribution, nobody flagged
  std::vector<SpringFlag> people;

  std::vector<int> outlier_ids() const;
  std::vector<double> scaled_forces() const;
};

/// Scales the per-person net magnitudes and flags everyone in Otsu's upper
/// class, i.e. histogram_bin(scaled) > threshold.
SpringFlags flag_force_outliers(const ForceField& field, Warnings* warnings = nullptr);

}  // namespace massimo
