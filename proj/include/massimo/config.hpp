#pragma once

#include <filesystem>
#include <string_view>

#include <json.hpp>

#include "massimo/ci_outliers.hpp"
#include "massimo/linefit.hpp"
#include "massimo/render.hpp"
#include "massimo/springs.hpp"

namespace massimo {

/// Which vector the spring model measures deviation against.
enum class DirectionMode {
  endpoints,   ///< last queue point minus first
  regression,  ///< chord of the fitted line between the first and last point
};

std::string_view to_string(DirectionMode mode);
DirectionMode direction_mode_from_string(std::string_view name);

struct Config {
  ModelSpec model;
  BandSpec band;
  SpringParams spring;
  DirectionMode direction = DirectionMode::endpoints;
  StyleConfig style;
  double conf_threshold = 0.5;

  void validate() const;
};

/// Overlays the keys present in `doc` onto `base`. Unknown keys are rejected
/// so a typo cannot silently fall back to a default.
Config config_from_json(const nlohmann::json& doc, Config base = {});
nlohmann::ordered_json config_to_json(const Config& config);
Config load_config(const std::filesystem::path& path, Config base = {});

}  // namespace massimo
