#include "massimo/config.hpp"

#include <fstream>
#include <initializer_list>
#include <string>

namespace massimo {

namespace {

using nlohmann::json;

void check_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed)
{
  if (!obj.is_object()) throw SchemaError(std::string(where) + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw SchemaError(std::string(where) + ": unknown key \"" + key + "\"");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, std::string_view where)
{
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw SchemaError(std::string(where) + "." + key + ": wrong type");
  }
}

}  // namespace

std::string_view to_string(DirectionMode mode)
{
  return mode == DirectionMode::regression ? "regression" : "endpoints";
}

DirectionMode direction_mode_from_string(std::string_view name)
{
  if (name == "endpoints") return DirectionMode::endpoints;
  if (name == "regression") return DirectionMode::regression;
  throw DomainError("unknown direction mode \"" + std::string(name) + "\"");
}

void Config::validate() const
{
  model.validate();
  band.validate();
  spring.validate();
  style.validate();
  if (!(conf_threshold >= 0.0 && conf_threshold <= 1.0))
    throw DomainError("conf_threshold must lie in [0, 1]");
}

Config config_from_json(const json& doc, Config c)
{
  check_keys(doc, "config", {"model", "band", "spring", "direction", "style", "conf_threshold"});

  if (auto it = doc.find("model"); it != doc.end()) {
    check_keys(*it, "model", {"kind", "degree", "lambda"});
    std::string kind(to_string(c.model.kind));
    read(*it, "kind", kind, "model");
    const ModelKind parsed = model_kind_from_string(kind);
    if (parsed != c.model.kind) {
      // Switching kind resets the kind-specific defaults before overlaying.
      c.model = parsed == ModelKind::polynomial ? ModelSpec::make_polynomial()
                : parsed == ModelKind::ridge    ? ModelSpec::make_ridge()
                                                : ModelSpec::make_linear();
    }
    read(*it, "degree", c.model.degree, "model");
    read(*it, "lambda", c.model.lambda, "model");
  }
  if (auto it = doc.find("band"); it != doc.end()) {
    check_keys(*it, "band", {"level", "mode"});
    read(*it, "level", c.band.level, "band");
    std::string mode(to_string(c.band.mode));
    read(*it, "mode", mode, "band");
    c.band.mode = band_mode_from_string(mode);
  }
  if (auto it = doc.find("spring"); it != doc.end()) {
    check_keys(*it, "spring", {"k"});
    read(*it, "k", c.spring.k, "spring");
  }
  if (auto it = doc.find("direction"); it != doc.end()) {
    if (!it->is_string()) throw SchemaError("config.direction: expected a string");
    c.direction = direction_mode_from_string(it->get<std::string>());
  }
  if (auto it = doc.find("style"); it != doc.end()) {
    check_keys(*it, "style", {"overlay_alpha", "ellipse_scale", "line_width", "outlier_box_color"});
    read(*it, "overlay_alpha", c.style.overlay_alpha, "style");
    read(*it, "ellipse_scale", c.style.ellipse_scale, "style");
    read(*it, "line_width", c.style.line_width, "style");
    if (auto box = it->find("outlier_box_color"); box != it->end()) {
      if (!box->is_array() || box->size() != 3) throw SchemaError("style.outlier_box_color: expected [r, g, b]");
      std::array<int, 3> rgb{};
      for (std::size_t i = 0; i < 3; ++i) {
        if (!(*box)[i].is_number_integer()) throw SchemaError("style.outlier_box_color: expected integers");
        rgb[i] = (*box)[i].get<int>();
        if (rgb[i] < 0 || rgb[i] > 255) throw SchemaError("style.outlier_box_color: channel outside [0,255]");
      }
      c.style.outlier_box_color = {static_cast<std::uint8_t>(rgb[0]), static_cast<std::uint8_t>(rgb[1]),
                                   static_cast<std::uint8_t>(rgb[2])};
    }
  }
  read(doc, "conf_threshold", c.conf_threshold, "config");
  c.validate();
  return c;
}

nlohmann::ordered_json config_to_json(const Config& c)
{
  nlohmann::ordered_json doc;
  doc["model"] = {{"kind", to_string(c.model.kind)}, {"degree", c.model.degree}, {"lambda", c.model.lambda}};
  doc["band"] = {{"level", c.band.level}, {"mode", to_string(c.band.mode)}};
  doc["spring"] = {{"k", c.spring.k}};
  doc["direction"] = to_string(c.direction);
  const Rgb box = c.style.outlier_box_color;
  doc["style"] = {{"overlay_alpha", c.style.overlay_alpha},
                  {"ellipse_scale", c.style.ellipse_scale},
                  {"line_width", c.style.line_width},
                  {"outlier_box_color", {box.r, box.g, box.b}}};
  doc["conf_threshold"] = c.conf_threshold;
  return doc;
}

Config load_config(const std::filesystem::path& path, Config base)
{
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("malformed config JSON in " + path.string() + ": " + e.what(), e.byte);
  }
  return config_from_json(doc, base);
}

}  // namespace massimo
