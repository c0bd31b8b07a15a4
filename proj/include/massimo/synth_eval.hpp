#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "massimo/ingest.hpp"

namespace massimo {

/// SplitMix64 (Steele, Lea & Flood). The generator is pinned so scenes are
/// reproducible from the seed on any platform; std distributions are not.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller, using the cosine branch only (two draws per sample).
  double gaussian();

 private:
  std::uint64_t state_;
};

struct Deviant {
  std::size_t index = 0;
  double offset = 0.0;  ///< perpendicular to the base line, + towards larger image y

  friend bool operator==(const Deviant&, const Deviant&) = default;
};

struct SceneSpec {
  std::size_t n_people = 20;
  double slope = 0.0;
  double intercept = 300.0;
  double spacing = 40.0;
  double noise_sigma = 2.0;
  std::vector<Deviant> deviants;
  std::uint64_t seed = 1;

  void validate() const;

  friend bool operator==(const SceneSpec&, const SceneSpec&) = default;
};

/// Missing keys keep their defaults; unknown keys throw SchemaError.
SceneSpec scene_spec_from_json(const nlohmann::json& doc, SceneSpec base = {});
nlohmann::ordered_json scene_spec_to_json(const SceneSpec& spec);

/// Parses "index:offset[,index:offset...]", e.g. "7:40,12:-25".
std::vector<Deviant> parse_deviants(std::string_view text);

struct Scene {
  std::vector<QueuePoint> points;  ///< person_id == index
  std::set<int> truth;
};

/// Person i sits at x = i * spacing on y = slope x + intercept, plus
/// N(0, noise_sigma) in y, plus its deviant offset along the unit normal
/// (-slope, 1) / sqrt(1 + slope^2).
Scene generate_queue(const SceneSpec& spec);

/// Wraps a scene into a keypoint document: hips straddle each point by
/// +-hip_half_width px so their midpoint is the point itself; the other
/// joints follow a fixed upright template. Everything is shifted by
/// `margin - min` so all keypoints fall inside the image.
PoseFrame scene_to_frame(const Scene& scene, double margin = 100.0, double hip_half_width = 12.0);

/// |detected| / |truth| * 100. Throws MetricError on empty truth.
double accuracy_paper(const std::set<int>& detected, const std::set<int>& truth);

struct Prf1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Precision is 1 with no detections, recall is 1 with no truth, and F1 is 0
/// when precision + recall = 0.
Prf1 prf1(const std::set<int>& detected, const std::set<int>& truth);

struct EvalResult {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::string method;
  std::set<int> detected;
  std::set<int> truth;
  Prf1 scores;
  double accuracy_paper = 0.0;  ///< NaN when truth is empty
};

EvalResult evaluate(std::uint64_t seed, std::size_t n, std::string method,
                    const std::set<int>& detected, const std::set<int>& truth);

inline constexpr const char* kEvalCsvHeader = "seed,n,method,precision,recall,f1,accuracy_paper";
/// accuracy_paper is left empty when it is undefined.
std::string to_csv_row(const EvalResult& result);
nlohmann::ordered_json eval_result_to_json(const EvalResult& result);

}  // namespace massimo
