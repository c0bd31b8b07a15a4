#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "massimo/common.hpp"

namespace massimo {

// COCO-17 skeleton layout.
inline constexpr std::size_t kKeypointCount = 17;
inline constexpr std::size_t kLeftHip = 11;
inline constexpr std::size_t kRightHip = 12;

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double confidence = 0.0;

  /// Detectors emit (0,0) for joints they could not localize.
  bool is_sentinel() const noexcept { return x == 0.0 && y == 0.0; }

  friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

struct PersonPose {
  int id = 0;
  std::array<Keypoint, kKeypointCount> keypoints{};

  friend bool operator==(const PersonPose&, const PersonPose&) = default;
};

struct PoseFrame {
  std::string image_path;
  int width = 0;
  int height = 0;
  std::vector<PersonPose> people;

  friend bool operator==(const PoseFrame&, const PoseFrame&) = default;
};

/// One person's anchor on the queue (hip midpoint, or a single hip as fallback).
struct QueuePoint {
  int person_id = 0;
  double x = 0.0;
  double y = 0.0;

  Point2 position() const noexcept { return {x, y}; }

  friend bool operator==(const QueuePoint&, const QueuePoint&) = default;
};

/// Parses the keypoint JSON document. Throws ParseError for malformed JSON and
/// SchemaError for shape violations. Out-of-frame detected keypoints are
/// clamped to the image rectangle and reported through `warnings`.
PoseFrame parse_keypoint_file(std::string_view bytes, Warnings* warnings = nullptr);

PoseFrame load_keypoint_file(const std::filesystem::path& path, Warnings* warnings = nullptr);

std::string serialize_keypoint_file(const PoseFrame& frame);

std::vector<QueuePoint> hip_midpoints(const PoseFrame& frame, double conf_threshold = 0.5,
                                      Warnings* warnings = nullptr);

/// Sorts points along the first principal axis of the cloud. The axis is
/// oriented so its dominant component is positive; ties fall back to
/// ascending y, then person id.
std::vector<QueuePoint> order_queue(std::vector<QueuePoint> points);

}  // namespace massimo
