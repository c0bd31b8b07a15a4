#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "massimo/common.hpp"
#include "massimo/render.hpp"

namespace massimo {

// Serialised form of one analysis. Every field is plain data so the report
// round-trips through JSON without loss and compares with ==.

struct PointEntry {
  int person_id = 0;
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const PointEntry&, const PointEntry&) = default;
};

struct DirectionEntry {
  std::string mode;
  double dx = 0.0;
  double dy = 0.0;
  friend bool operator==(const DirectionEntry&, const DirectionEntry&) = default;
};

struct LineEntry {
  std::string kind;
  int degree = 1;
  double lambda = 0.0;
  std::vector<double> coefficients;
  bool axes_swapped = false;
  friend bool operator==(const LineEntry&, const LineEntry&) = default;
};

struct CiEntry {
  double level = 0.95;
  std::string mode;
  std::vector<int> outliers;
  friend bool operator==(const CiEntry&, const CiEntry&) = default;
};

struct SpringEntry {
  std::optional<double> otsu_threshold;  ///< null in JSON for degenerate distributions
  std::vector<int> outliers;
  std::vector<double> scaled_forces;
  friend bool operator==(const SpringEntry&, const SpringEntry&) = default;
};

struct LinkEntry {
  std::size_t i = 0;
  double d = 0.0;
  double theta = 0.0;
  double magnitude = 0.0;
  friend bool operator==(const LinkEntry&, const LinkEntry&) = default;
};

struct NetEntry {
  int person_id = 0;
  double fx = 0.0;
  double fy = 0.0;
  double magnitude = 0.0;
  friend bool operator==(const NetEntry&, const NetEntry&) = default;
};

struct ForcesEntry {
  double k = 1.0;
  std::vector<LinkEntry> links;
  std::vector<NetEntry> net;
  friend bool operator==(const ForcesEntry&, const ForcesEntry&) = default;
};

struct ColorEntry {
  int person_id = 0;
  Rgb rgb;
  friend bool operator==(const ColorEntry&, const ColorEntry&) = default;
};

struct AnalysisReport {
  std::string source;
  std::vector<PointEntry> points;  ///< queue order
  DirectionEntry direction;
  LineEntry line;
  CiEntry ci;
  SpringEntry spring;
  ForcesEntry forces;
  std::vector<ColorEntry> colors;
  Warnings warnings;

  friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

/// Throws SchemaError when `doc` is not a report.
AnalysisReport report_from_json(const nlohmann::json& doc);

/// Pretty-printed JSON text with a trailing newline; byte-stable for equal reports.
std::string dump_report(const AnalysisReport& report);

}  // namespace massimo
