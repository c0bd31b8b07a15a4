#include "massimo/report.hpp"

#include <cmath>
#include <string_view>

#include <rapidjson/prettywriter.h>
#include <rapidjson/stringbuffer.h>

namespace massimo {

namespace {

using nlohmann::json;
using Writer = rapidjson::PrettyWriter<rapidjson::StringBuffer>;

const json& at(const json& node, const char* key)
{
  auto it = node.find(key);
  if (it == node.end()) throw SchemaError(std::string("report: missing \"") + key + "\"");
  return *it;
}

void key(Writer& w, std::string_view k) { w.Key(k.data(), static_cast<rapidjson::SizeType>(k.size())); }

void str(Writer& w, const std::string& v) { w.String(v.data(), static_cast<rapidjson::SizeType>(v.size())); }

// Non-finite values become null, as JSON has no spelling for them.
void num(Writer& w, double v)
{
  if (std::isfinite(v)) w.Double(v);
  else w.Null();
}

template <class T>
void int_array(Writer& w, const std::vector<T>& values)
{
  w.StartArray();
  for (T v : values) w.Int64(static_cast<std::int64_t>(v));
  w.EndArray();
}

void write_report(Writer& w, const AnalysisReport& r)
{
  w.StartObject();
  key(w, "source");
  str(w, r.source);

  key(w, "points");
  w.StartArray();
  for (const auto& p : r.points) {
    w.StartObject();
    key(w, "person_id");
    w.Int(p.person_id);
    key(w, "x");
    num(w, p.x);
    key(w, "y");
    num(w, p.y);
    w.EndObject();
  }
  w.EndArray();

  key(w, "direction");
  w.StartObject();
  key(w, "mode");
  str(w, r.direction.mode);
  key(w, "dx");
  num(w, r.direction.dx);
  key(w, "dy");
  num(w, r.direction.dy);
  w.EndObject();

  key(w, "line");
  w.StartObject();
  key(w, "kind");
  str(w, r.line.kind);
  key(w, "degree");
  w.Int(r.line.degree);
  key(w, "lambda");
  num(w, r.line.lambda);
  key(w, "coefficients");
  w.StartArray();
  for (double c : r.line.coefficients) num(w, c);
  w.EndArray();
  key(w, "axes_swapped");
  w.Bool(r.line.axes_swapped);
  w.EndObject();

  key(w, "ci");
  w.StartObject();
  key(w, "method");
  w.String("ci");
  key(w, "level");
  num(w, r.ci.level);
  key(w, "mode");
  str(w, r.ci.mode);
  key(w, "outliers");
  int_array(w, r.ci.outliers);
  w.EndObject();

  key(w, "spring");
  w.StartObject();
  key(w, "method");
  w.String("spring");
  key(w, "otsu_threshold");
  if (r.spring.otsu_threshold) num(w, *r.spring.otsu_threshold);
  else w.Null();
  key(w, "outliers");
  int_array(w, r.spring.outliers);
  key(w, "scaled_forces");
  w.StartArray();
  for (double v : r.spring.scaled_forces) num(w, v);
  w.EndArray();
  w.EndObject();

  key(w, "forces");
  w.StartObject();
  key(w, "k");
  num(w, r.forces.k);
  key(w, "links");
  w.StartArray();
  for (const auto& l : r.forces.links) {
    w.StartObject();
    key(w, "i");
    w.Uint64(l.i);
    key(w, "d");
    num(w, l.d);
    key(w, "theta");
    num(w, l.theta);
    key(w, "magnitude");
    num(w, l.magnitude);
    w.EndObject();
  }
  w.EndArray();
  key(w, "net");
  w.StartArray();
  for (const auto& f : r.forces.net) {
    w.StartObject();
    key(w, "person_id");
    w.Int(f.person_id);
    key(w, "fx");
    num(w, f.fx);
    key(w, "fy");
    num(w, f.fy);
    key(w, "magnitude");
    num(w, f.magnitude);
    w.EndObject();
  }
  w.EndArray();
  w.EndObject();

  key(w, "colors");
  w.StartArray();
  for (const auto& c : r.colors) {
    w.StartObject();
    key(w, "person_id");
    w.Int(c.person_id);
    key(w, "rgb");
    w.StartArray();
    w.Int(c.rgb.r);
    w.Int(c.rgb.g);
    w.Int(c.rgb.b);
    w.EndArray();
    w.EndObject();
  }
  w.EndArray();

  key(w, "warnings");
  w.StartArray();
  for (const auto& msg : r.warnings) str(w, msg);
  w.EndArray();
  w.EndObject();
}

}  // namespace

AnalysisReport report_from_json(const json& doc)
{
  AnalysisReport r;
  try {
    r.source = at(doc, "source").get<std::string>();
    for (const auto& p : at(doc, "points"))
      r.points.push_back({at(p, "person_id").get<int>(), at(p, "x").get<double>(), at(p, "y").get<double>()});

    const json& dir = at(doc, "direction");
    r.direction = {at(dir, "mode").get<std::string>(), at(dir, "dx").get<double>(), at(dir, "dy").get<double>()};

    const json& line = at(doc, "line");
    r.line.kind = at(line, "kind").get<std::string>();
    r.line.degree = at(line, "degree").get<int>();
    r.line.lambda = at(line, "lambda").get<double>();
    r.line.coefficients = at(line, "coefficients").get<std::vector<double>>();
    r.line.axes_swapped = at(line, "axes_swapped").get<bool>();

    const json& ci = at(doc, "ci");
    r.ci.level = at(ci, "level").get<double>();
    r.ci.mode = at(ci, "mode").get<std::string>();
    r.ci.outliers = at(ci, "outliers").get<std::vector<int>>();

    const json& spring = at(doc, "spring");
    const json& thr = at(spring, "otsu_threshold");
    if (!thr.is_null()) r.spring.otsu_threshold = thr.get<double>();
    r.spring.outliers = at(spring, "outliers").get<std::vector<int>>();
    r.spring.scaled_forces = at(spring, "scaled_forces").get<std::vector<double>>();

    const json& forces = at(doc, "forces");
    r.forces.k = at(forces, "k").get<double>();
    for (const auto& l : at(forces, "links")) {
      r.forces.links.push_back({at(l, "i").get<std::size_t>(), at(l, "d").get<double>(),
                                at(l, "theta").get<double>(), at(l, "magnitude").get<double>()});
    }
    for (const auto& f : at(forces, "net")) {
      r.forces.net.push_back({at(f, "person_id").get<int>(), at(f, "fx").get<double>(),
                              at(f, "fy").get<double>(), at(f, "magnitude").get<double>()});
    }

    for (const auto& c : at(doc, "colors")) {
      const auto rgb = at(c, "rgb").get<std::vector<int>>();
      if (rgb.size() != 3) throw SchemaError("report: colour must have 3 channels");
      r.colors.push_back({at(c, "person_id").get<int>(),
                          {static_cast<std::uint8_t>(rgb[0]), static_cast<std::uint8_t>(rgb[1]),
                           static_cast<std::uint8_t>(rgb[2])}});
    }
    r.warnings = at(doc, "warnings").get<Warnings>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("report: ") + e.what());
  }
  return r;
}

std::string dump_report(const AnalysisReport& report)
{
  rapidjson::StringBuffer buf;
  Writer w(buf);
  w.SetIndent(' ', 2);
  write_report(w, report);
  return std::string(buf.GetString(), buf.GetSize()) + "\n";
}

}  // namespace massimo
