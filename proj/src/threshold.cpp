#include "massimo/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace massimo {

namespace {

__extension__ typedef unsigned __int128 uint128;

// Largest sample count for which the exact score comparison cannot overflow:
// score numerators are <= 255^2 N^3 and denominators <= N^2.
constexpr std::uint64_t kExactLimit = 4'000'000;

struct Score {
  uint128 num = 0;
  uint128 den = 1;
  long double approx = 0.0L;
};

}  // namespace

std::vector<double> minmax_scale(std::span<const double> values, Warnings* warnings)
{
  std::vector<double> out(values.size(), 0.0);
  if (values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double min = *lo;
  const double max = *hi;
  if (!(max > min)) {
    warn(warnings, "min-max scaling: all values equal, scaled to 0");
    return out;
  }
  const double range = max - min;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - min) / range * 255.0;
  return out;
}

int histogram_bin(double scaled)
{
  if (!(scaled > 0.0)) return 0;
  if (scaled >= 255.0) return 255;
  return static_cast<int>(std::floor(scaled));
}

std::optional<OtsuResult> otsu_threshold(std::span<const double> scaled)
{
  if (scaled.size() < 2) return std::nullopt;

  std::array<std::uint64_t, kHistogramBins> hist{};
  for (double v : scaled) ++hist[static_cast<std::size_t>(histogram_bin(v))];

  const std::uint64_t total = scaled.size();
  std::uint64_t total_sum = 0;
  for (int b = 0; b < kHistogramBins; ++b) total_sum += static_cast<std::uint64_t>(b) * hist[b];
  const bool exact = total <= kExactLimit;

  // Minimising sigma_W^2 = (Q - S1^2/n1 - S2^2/n2) / N over t is the same as
  // maximising S1^2/n1 + S2^2/n2, since Q (sum of squares) is fixed.
  std::optional<int> best_t;
  Score best;
  std::uint64_t n1 = 0;
  std::uint64_t s1 = 0;
  for (int t = 0; t < kHistogramBins - 1; ++t) {
    n1 += hist[t];
    s1 += static_cast<std::uint64_t>(t) * hist[t];
    const std::uint64_t n2 = total - n1;
    if (n1 == 0 || n2 == 0) continue;
    const std::uint64_t s2 = total_sum - s1;

    Score cand;
    if (exact) {
      cand.num = uint128(s1) * s1 * n2 + uint128(s2) * s2 * n1;
      cand.den = uint128(n1) * n2;
    } else {
      cand.approx = static_cast<long double>(s1) * s1 / n1 + static_cast<long double>(s2) * s2 / n2;
    }
    const bool better = !best_t || (exact ? cand.num * best.den > best.num * cand.den
                                          : cand.approx > best.approx);
    if (better) {
      best_t = t;
      best = cand;
    }
  }
  if (!best_t) return std::nullopt;

  OtsuResult r;
  r.threshold = *best_t;
  std::array<double, 2> count{}, mean{}, m2{};
  for (int b = 0; b < kHistogramBins; ++b) {
    const int c = b <= r.threshold ? 0 : 1;
    count[c] += static_cast<double>(hist[b]);
    mean[c] += static_cast<double>(hist[b]) * b;
  }
  for (int c = 0; c < 2; ++c) mean[c] /= count[c];
  for (int b = 0; b < kHistogramBins; ++b) {
    const int c = b <= r.threshold ? 0 : 1;
    m2[c] += static_cast<double>(hist[b]) * (b - mean[c]) * (b - mean[c]);
  }
  const double n = static_cast<double>(total);
  for (int c = 0; c < 2; ++c) {
    r.class_probs[c] = count[c] / n;
    r.class_vars[c] = m2[c] / count[c];
  }
  r.intra_class_variance = r.class_probs[0] * r.class_vars[0] + r.class_probs[1] * r.class_vars[1];
  r.between_class_variance =
      r.class_probs[0] * r.class_probs[1] * (mean[0] - mean[1]) * (mean[0] - mean[1]);
  return r;
}

std::vector<int> SpringFlags::outlier_ids() const
{
  std::vector<int> ids;
  for (const auto& p : people)
    if (p.is_outlier) ids.push_back(p.person_id);
  return ids;
}

std::vector<double> SpringFlags::scaled_forces() const
{
  std::vector<double> out;
  out.reserve(people.size());
  for (const auto& p : people) out.push_back(p.scaled_force);
  return out;
}

SpringFlags flag_force_outliers(const ForceField& field, Warnings* warnings)
{
  SpringFlags flags;
  const std::vector<double> scaled = minmax_scale(field.net_magnitude, warnings);
  if (scaled.size() >= 2) {
    flags.otsu = otsu_threshold(scaled);
    if (!flags.otsu)
      warn(warnings, "spring forces occupy a single histogram bin; no spring outliers");
  }
  flags.people.reserve(scaled.size());
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    const bool outlier = flags.otsu && histogram_bin(scaled[i]) > flags.otsu->threshold;
    flags.people.push_back({field.person_ids[i], scaled[i], outlier});
  }
  return flags;
}

}  // namespace massimo
