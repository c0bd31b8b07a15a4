#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "massimo/ingest.hpp"

namespace massimo::test {

inline std::filesystem::path data_path(const std::string& name)
{
  return std::filesystem::path(MASSIMO_TEST_DATA) / name;
}

// Person 0 with both hips detected at (100,200) and (120,200).
inline std::string one_person_json(int keypoint_count = 17, int id = 0)
{
  std::string s = R"({"image": {"path": "", "width": 640, "height": 480}, "people": [{"id": )" +
                  std::to_string(id) + R"(, "keypoints": [)";
  for (int k = 0; k < keypoint_count; ++k) {
    if (k) s += ",";
    if (k == 11) s += "[100, 200, 0.9]";
    else if (k == 12) s += "[120, 200, 0.9]";
    else s += "[50, 60, 0.8]";
  }
  return s + "]}]}";
}

inline std::vector<QueuePoint> make_points(std::initializer_list<std::pair<double, double>> xy)
{
  std::vector<QueuePoint> out;
  int id = 0;
  for (auto [x, y] : xy) out.push_back({id++, x, y});
  return out;
}

// Left-to-right queue with x strictly increasing and random lateral wobble.
inline std::vector<QueuePoint> random_queue(std::mt19937_64& rng, std::size_t n, double wobble = 30.0)
{
  std::uniform_real_distribution<double> gap(20.0, 80.0), lateral(-wobble, wobble), start(0.0, 500.0);
  std::vector<QueuePoint> out;
  double x = start(rng);
  const double y0 = start(rng);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({static_cast<int>(i), x, y0 + lateral(rng)});
    x += gap(rng);
  }
  return out;
}

}  // namespace massimo::test
