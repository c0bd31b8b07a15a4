#include "massimo/synth_eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace massimo {

std::uint64_t SplitMix64::next()
{
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double SplitMix64::gaussian()
{
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void SceneSpec::validate() const
{
  if (n_people < 2) throw DomainError("scene needs at least 2 people");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw DomainError("spacing must be > 0");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
    throw DomainError("noise_sigma must be >= 0");
  if (!std::isfinite(slope) || !std::isfinite(intercept))
    throw DomainError("base line must be finite");
  std::set<std::size_t> seen;
  for (const auto& d : deviants) {
    if (d.index >= n_people)
      throw DomainError("deviant index " + std::to_string(d.index) + " out of range");
    if (!seen.insert(d.index).second)
      throw DomainError("deviant index " + std::to_string(d.index) + " listed twice");
    if (!std::isfinite(d.offset)) throw DomainError("deviant offset must be finite");
  }
}

Scene generate_queue(const SceneSpec& spec)
{
  spec.validate();
  SplitMix64 rng(spec.seed);
  const double norm = std::sqrt(1.0 + spec.slope * spec.slope);
  const double nx = -spec.slope / norm;
  const double ny = 1.0 / norm;

  Scene scene;
  scene.points.reserve(spec.n_people);
  for (std::size_t i = 0; i < spec.n_people; ++i) {
    const double x = static_cast<double>(i) * spec.spacing;
    double y = spec.slope * x + spec.intercept;
    // Always draw, so a deviant list never shifts the noise of other people.
    const double noise = rng.gaussian();
    if (spec.noise_sigma > 0.0) y += spec.noise_sigma * noise;
    scene.points.push_back({static_cast<int>(i), x, y});
  }
  for (const auto& d : spec.deviants) {
    scene.points[d.index].x += d.offset * nx;
    scene.points[d.index].y += d.offset * ny;
    scene.truth.insert(static_cast<int>(d.index));
  }
  return scene;
}

PoseFrame scene_to_frame(const Scene& scene, double margin, double hip_half_width)
{
  // Upright figure relative to the hip midpoint, COCO-17 order.
  static constexpr std::array<Point2, kKeypointCount> kTemplate{{
      {0, -110}, {-4, -114}, {4, -114}, {-8, -112}, {8, -112}, {-18, -80}, {18, -80},
      {-22, -50}, {22, -50}, {-22, -20}, {22, -20}, {0, 0}, {0, 0}, {-10, 45}, {10, 45},
      {-10, 90}, {10, 90},
  }};
  constexpr double kConfidence = 0.9;

  PoseFrame frame;
  frame.people.reserve(scene.points.size());
  double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
  double max_x = -min_x, max_y = -min_x;
  for (const auto& p : scene.points) {
    PersonPose person;
    person.id = p.person_id;
    for (std::size_t k = 0; k < kKeypointCount; ++k) {
      Keypoint& kp = person.keypoints[k];
      kp = {p.x + kTemplate[k].x, p.y + kTemplate[k].y, kConfidence};
      if (k == kLeftHip) kp.x = p.x - hip_half_width;
      if (k == kRightHip) kp.x = p.x + hip_half_width;
      min_x = std::min(min_x, kp.x);
      min_y = std::min(min_y, kp.y);
      max_x = std::max(max_x, kp.x);
      max_y = std::max(max_y, kp.y);
    }
    frame.people.push_back(person);
  }
  if (frame.people.empty()) {
    frame.width = frame.height = static_cast<int>(2 * margin);
    return frame;
  }
  const double shift_x = margin - min_x;
  const double shift_y = margin - min_y;
  for (auto& person : frame.people) {
    for (auto& kp : person.keypoints) {
      kp.x += shift_x;
      kp.y += shift_y;
    }
  }
  frame.width = static_cast<int>(std::ceil(max_x + shift_x + margin));
  frame.height = static_cast<int>(std::ceil(max_y + shift_y + margin));
  return frame;
}

double accuracy_paper(const std::set<int>& detected, const std::set<int>& truth)
{
  if (truth.empty()) throw MetricError("accuracy is undefined without ground-truth outliers");
  return static_cast<double>(detected.size()) / static_cast<double>(truth.size()) * 100.0;
}

Prf1 prf1(const std::set<int>& detected, const std::set<int>& truth)
{
  std::size_t tp = 0;
  for (int id : detected) tp += truth.count(id);
  const std::size_t fp = detected.size() - tp;
  const std::size_t fn = truth.size() - tp;

  Prf1 r;
  r.precision = detected.empty() ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  r.recall = truth.empty() ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  const double sum = r.precision + r.recall;
  r.f1 = sum > 0.0 ? 2.0 * r.precision * r.recall / sum : 0.0;
  return r;
}

EvalResult evaluate(std::uint64_t seed, std::size_t n, std::string method,
                    const std::set<int>& detected, const std::set<int>& truth)
{
  EvalResult r;
  r.seed = seed;
  r.n = n;
  r.method = std::move(method);
  r.detected = detected;
  r.truth = truth;
  r.scores = prf1(detected, truth);
  r.accuracy_paper =
      truth.empty() ? std::numeric_limits<double>::quiet_NaN() : accuracy_paper(detected, truth);
  return r;
}

std::string to_csv_row(const EvalResult& r)
{
  char buf[256];
  std::snprintf(buf, sizeof buf, "%llu,%zu,%s,%.6f,%.6f,%.6f,",
                static_cast<unsigned long long>(r.seed), r.n, r.method.c_str(), r.scores.precision,
                r.scores.recall, r.scores.f1);
  std::string row = buf;
  if (!std::isnan(r.accuracy_paper)) {
    std::snprintf(buf, sizeof buf, "%.6f", r.accuracy_paper);
    row += buf;
  }
  return row;
}

SceneSpec scene_spec_from_json(const nlohmann::json& doc, SceneSpec s)
{
  if (!doc.is_object()) throw SchemaError("scene: expected an object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "n_people" && key != "base_line" && key != "spacing" && key != "noise_sigma" &&
        key != "deviants" && key != "seed")
      throw SchemaError("scene: unknown key \"" + key + "\"");
  }
  try {
    if (doc.contains("n_people")) s.n_people = doc.at("n_people").get<std::size_t>();
    if (doc.contains("base_line")) {
      const auto& line = doc.at("base_line");
      s.slope = line.at("slope").get<double>();
      s.intercept = line.at("intercept").get<double>();
    }
    if (doc.contains("spacing")) s.spacing = doc.at("spacing").get<double>();
    if (doc.contains("noise_sigma")) s.noise_sigma = doc.at("noise_sigma").get<double>();
    if (doc.contains("seed")) s.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("deviants")) {
      s.deviants.clear();
      for (const auto& d : doc.at("deviants"))
        s.deviants.push_back({d.at("index").get<std::size_t>(), d.at("offset").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("scene: ") + e.what());
  }
  s.validate();
  return s;
}

nlohmann::ordered_json scene_spec_to_json(const SceneSpec& s)
{
  nlohmann::ordered_json doc;
  doc["n_people"] = s.n_people;
  doc["base_line"] = {{"slope", s.slope}, {"intercept", s.intercept}};
  doc["spacing"] = s.spacing;
  doc["noise_sigma"] = s.noise_sigma;
  auto deviants = nlohmann::ordered_json::array();
  for (const auto& d : s.deviants) deviants.push_back({{"index", d.index}, {"offset", d.offset}});
  doc["deviants"] = std::move(deviants);
  doc["seed"] = s.seed;
  return doc;
}

std::vector<Deviant> parse_deviants(std::string_view text)
{
  std::vector<Deviant> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string item(text.substr(pos, end - pos));
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos) throw DomainError("deviant \"" + item + "\": expected index:offset");
    try {
      std::size_t used = 0;
      const unsigned long index = std::stoul(item.substr(0, colon), &used);
      if (used != colon) throw std::invalid_argument("index");
      const std::string off = item.substr(colon + 1);
      const double offset = std::stod(off, &used);
      if (used != off.size()) throw std::invalid_argument("offset");
      out.push_back({index, offset});
    } catch (const std::logic_error&) {
      throw DomainError("deviant \"" + item + "\": expected index:offset");
    }
    pos = end + 1;
  }
  return out;
}

nlohmann::ordered_json eval_result_to_json(const EvalResult& r)
{
  nlohmann::ordered_json doc;
  doc["seed"] = r.seed;
  doc["n"] = r.n;
  doc["method"] = r.method;
  doc["accuracy_paper"] = std::isnan(r.accuracy_paper) ? nlohmann::ordered_json() : nlohmann::ordered_json(r.accuracy_paper);
  doc["precision"] = r.scores.precision;
  doc["recall"] = r.scores.recall;
  doc["f1"] = r.scores.f1;
  doc["detected"] = r.detected;
  doc["truth"] = r.truth;
  return doc;
}

}  // namespace massimo
