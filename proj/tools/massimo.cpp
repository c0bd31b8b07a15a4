#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "massimo/config.hpp"
#include "massimo/image_io.hpp"
#include "massimo/ingest.hpp"
#include "massimo/linefit.hpp"
#include "massimo/pipeline.hpp"
#include "massimo/synth_eval.hpp"

namespace fs = std::filesystem;
using namespace massimo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInsufficient = 2;

struct ConfigFlags {
  std::string config_path;
  std::optional<std::string> model;
  std::optional<int> degree;
  std::optional<double> lambda;
  std::optional<double> level;
  std::optional<std::string> band_mode;
  std::optional<double> k;
  std::optional<std::string> direction;
  std::optional<double> alpha;
  std::optional<double> conf;

  void attach(CLI::App* cmd)
  {
    cmd->add_option("--config", config_path, "JSON config file (default: $MASSIMO_CONFIG)");
    cmd->add_option("--model", model, "linear | polynomial | ridge");
    cmd->add_option("--degree", degree, "polynomial or ridge degree");
    cmd->add_option("--lambda", lambda, "ridge penalty");
    cmd->add_option("--level", level, "confidence band level");
    cmd->add_option("--band-mode", band_mode, "constant | prediction");
    cmd->add_option("--k", k, "spring constant");
    cmd->add_option("--direction", direction, "endpoints | regression");
    cmd->add_option("--alpha", alpha, "overlay opacity");
    cmd->add_option("--conf", conf, "minimum hip keypoint confidence");
  }

  // File values first, then flags on top, through the same parser.
  Config resolve() const
  {
    Config cfg;
    std::string path = config_path;
    if (path.empty()) {
      if (const char* env = std::getenv("MASSIMO_CONFIG"); env && *env) path = env;
    }
    if (!path.empty()) cfg = load_config(path);

    nlohmann::json overlay = nlohmann::json::object();
    if (model) overlay["model"]["kind"] = *model;
    if (degree) overlay["model"]["degree"] = *degree;
    if (lambda) overlay["model"]["lambda"] = *lambda;
    if (level) overlay["band"]["level"] = *level;
    if (band_mode) overlay["band"]["mode"] = *band_mode;
    if (k) overlay["spring"]["k"] = *k;
    if (direction) overlay["direction"] = *direction;
    if (alpha) overlay["style"]["overlay_alpha"] = *alpha;
    if (conf) overlay["conf_threshold"] = *conf;
    cfg = config_from_json(overlay, cfg);
    cfg.validate();
    return cfg;
  }
};

struct SceneFlags {
  std::string scene_path;
  std::optional<std::size_t> n;
  std::optional<double> slope;
  std::optional<double> intercept;
  std::optional<double> spacing;
  std::optional<double> noise;
  std::optional<std::string> deviants;

  void attach(CLI::App* cmd)
  {
    cmd->add_option("--scene", scene_path, "JSON scene description");
    cmd->add_option("--n", n, "number of people");
    cmd->add_option("--slope", slope, "base line slope");
    cmd->add_option("--intercept", intercept, "base line intercept");
    cmd->add_option("--spacing", spacing, "horizontal spacing between people");
    cmd->add_option("--noise", noise, "Gaussian y jitter (px)");
    cmd->add_option("--deviants", deviants, "index:offset[,index:offset...]");
  }

  SceneSpec resolve() const
  {
    SceneSpec spec;
    if (!scene_path.empty()) {
      std::ifstream in(scene_path, std::ios::binary);
      if (!in) throw Error("cannot read " + scene_path);
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(scene_path + ": " + e.what(), e.byte);
      }
      spec = scene_spec_from_json(doc);
    }
    if (n) spec.n_people = *n;
    if (slope) spec.slope = *slope;
    if (intercept) spec.intercept = *intercept;
    if (spacing) spec.spacing = *spacing;
    if (noise) spec.noise_sigma = *noise;
    if (deviants) spec.deviants = parse_deviants(*deviants);
    spec.validate();
    return spec;
  }
};

int exit_code_for(const std::exception_ptr& ep, std::string* message)
{
  try {
    std::rethrow_exception(ep);
  } catch (const InsufficientDataError& e) {
    *message = e.what();
    return kExitInsufficient;
  } catch (const DegenerateGeometryError& e) {
    *message = e.what();
    return kExitInsufficient;
  } catch (const std::exception& e) {
    *message = e.what();
    return kExitInput;
  }
}

// Runs `body`, turning exceptions into the documented exit codes.
template <typename F>
int guarded(const std::string& context, F&& body)
{
  try {
    return body();
  } catch (...) {
    std::string message;
    const int code = exit_code_for(std::current_exception(), &message);
    std::cerr << "massimo: " << (context.empty() ? "" : context + ": ") << message << "\n";
    return code;
  }
}

// "-" reads standard input.
PoseFrame read_frame(const std::string& path, Warnings* warnings)
{
  if (path != "-") return load_keypoint_file(path, warnings);
  const std::string bytes{std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  return parse_keypoint_file(bytes, warnings);
}

fs::path search_dir_for(const std::string& path)
{
  return path == "-" ? fs::current_path() : fs::path(path).parent_path();
}

std::string join_ids(const std::vector<int>& ids)
{
  std::string s = "[";
  for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? "," : "") + std::to_string(ids[i]);
  return s + "]";
}

void print_warnings(const std::string& label, const Warnings& warnings)
{
  for (const auto& w : warnings) std::cerr << label << ": warning: " << w << "\n";
}

// One output directory per input; batch runs get a subdirectory per file stem.
std::vector<fs::path> output_dirs(const std::vector<std::string>& inputs, const fs::path& out)
{
  if (inputs.size() == 1) return {out};
  std::vector<fs::path> dirs;
  std::map<std::string, int> seen;
  for (const auto& in : inputs) {
    std::string stem = in == "-" ? "stdin" : fs::path(in).stem().string();
    const int count = seen[stem]++;
    if (count > 0) stem += "-" + std::to_string(count);
    dirs.push_back(out / stem);
  }
  return dirs;
}

int run_validate(const std::vector<std::string>& inputs)
{
  int worst = kExitOk;
  for (const auto& in : inputs) {
    worst = std::max(worst, guarded(in, [&] {
      Warnings warnings;
      const PoseFrame frame = read_frame(in, &warnings);
      print_warnings(in, warnings);
      std::cout << in << ": valid, " << frame.people.size() << " people\n";
      return kExitOk;
    }));
  }
  return worst;
}

int run_analyze(const std::vector<std::string>& inputs, const fs::path& out, const ConfigFlags& flags,
                unsigned jobs)
{
  Config config;
  if (const int code = guarded("config", [&] { config = flags.resolve(); return kExitOk; }))
    return code;

  const auto dirs = output_dirs(inputs, out);
  std::vector<int> codes(inputs.size(), kExitOk);
  std::vector<std::string> logs(inputs.size());

  auto process = [&](std::size_t i) {
    std::ostringstream log;
    codes[i] = [&] {
      try {
        Warnings warnings;
        const PoseFrame frame = read_frame(inputs[i], &warnings);
        const AnalyzeOutputs result =
            analyze_to_dir(frame, std::move(warnings), search_dir_for(inputs[i]), config, dirs[i]);
        for (const auto& w : result.report.warnings) log << inputs[i] << ": warning: " << w << "\n";
        log << inputs[i] << ": " << result.report.points.size() << " people, ci outliers "
            << join_ids(result.report.ci.outliers) << ", spring outliers "
            << join_ids(result.report.spring.outliers) << " -> " << dirs[i].string() << "\n";
        return kExitOk;
      } catch (...) {
        std::string message;
        const int code = exit_code_for(std::current_exception(), &message);
        log << "massimo: " << inputs[i] << ": " << message << "\n";
        return code;
      }
    }();
    logs[i] = log.str();
  };

  // Workers share only the immutable config; each owns its output slot.
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(inputs.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < inputs.size(); ++i) process(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < inputs.size();) process(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  int worst = kExitOk;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    (codes[i] == kExitOk ? std::cout : std::cerr) << logs[i];
    worst = std::max(worst, codes[i]);
  }
  return worst;
}

int run_fit(const std::string& input, const ConfigFlags& flags)
{
  return guarded(input, [&] {
    const Config config = flags.resolve();
    Warnings warnings;
    const PoseFrame frame = read_frame(input, &warnings);
    const auto points = order_queue(hip_midpoints(frame, config.conf_threshold, &warnings));
    print_warnings(input, warnings);
    const FittedLine line = fit_line(points, config.model);

    nlohmann::ordered_json doc;
    doc["kind"] = to_string(line.spec.kind);
    doc["degree"] = line.spec.degree;
    doc["lambda"] = line.spec.lambda;
    doc["coefficients"] = line.coefficients;
    doc["n_points"] = line.n_points;
    if (points.size() >= 3) {
      const ResidualStats stats = residual_stats(line, points);
      doc["residuals"] = {{"sse", stats.sse}, {"se", stats.se}, {"df", stats.df}};
    }
    std::cout << doc.dump(2) << "\n";
    return kExitOk;
  });
}

fs::path truth_sidecar(const fs::path& out)
{
  fs::path p = out;
  p.replace_extension();
  return p.string() + ".truth.json";
}

int run_synth(const SceneFlags& scene_flags, std::optional<std::uint64_t> seed, const std::string& out)
{
  return guarded("synth", [&] {
    SceneSpec spec = scene_flags.resolve();
    if (seed) spec.seed = *seed;
    const Scene scene = generate_queue(spec);
    const PoseFrame frame = scene_to_frame(scene);
    const std::string keypoints = serialize_keypoint_file(frame);

    nlohmann::ordered_json sidecar;
    sidecar["scene"] = scene_spec_to_json(spec);
    sidecar["truth"] = scene.truth;
    auto midpoints = nlohmann::ordered_json::array();
    for (const auto& p : hip_midpoints(frame, 0.0))
      midpoints.push_back({{"person_id", p.person_id}, {"x", p.x}, {"y", p.y}});
    sidecar["points"] = std::move(midpoints);

    if (out.empty() || out == "-") {
      std::cout << keypoints;
      return kExitOk;
    }
    const fs::path path = out;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream(path, std::ios::binary) << keypoints;
    std::ofstream(truth_sidecar(path), std::ios::binary) << sidecar.dump(2) << "\n";
    std::cout << path.string() << "\n" << truth_sidecar(path).string() << "\n";
    return kExitOk;
  });
}

std::vector<std::uint64_t> parse_seeds(const std::string& text)
{
  std::vector<std::uint64_t> seeds;
  std::stringstream items(text);
  for (std::string item; std::getline(items, item, ',');) {
    try {
      const auto dots = item.find("..");
      std::size_t used = 0;
      if (dots == std::string::npos) {
        seeds.push_back(std::stoull(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
        continue;
      }
      const std::string lo_s = item.substr(0, dots), hi_s = item.substr(dots + 2);
      const std::uint64_t lo = std::stoull(lo_s, &used);
      if (used != lo_s.size()) throw std::invalid_argument(item);
      const std::uint64_t hi = std::stoull(hi_s, &used);
      if (used != hi_s.size() || hi < lo) throw std::invalid_argument(item);
      for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    } catch (const std::logic_error&) {
      throw DomainError("seeds \"" + item + "\": expected N, A..B or a comma list of those");
    }
  }
  if (seeds.empty()) throw DomainError("no seeds given");
  return seeds;
}

int run_eval(const SceneFlags& scene_flags, const ConfigFlags& config_flags, const std::string& seeds_text,
             const std::string& method, const std::string& out)
{
  return guarded("eval", [&] {
    if (method != "ci" && method != "spring" && method != "both")
      throw DomainError("method must be ci, spring or both");
    const Config config = config_flags.resolve();
    const SceneSpec base = scene_flags.resolve();
    const auto seeds = parse_seeds(seeds_text);

    std::ostringstream csv;
    csv << kEvalCsvHeader << "\n";
    for (std::uint64_t seed : seeds) {
      SceneSpec spec = base;
      spec.seed = seed;
      const Scene scene = generate_queue(spec);
      const Analysis analysis = analyze_frame(scene_to_frame(scene), config);
      const auto& ci = analysis.report.ci.outliers;
      const auto& spring = analysis.report.spring.outliers;
      if (method != "spring")
        csv << to_csv_row(evaluate(seed, spec.n_people, "ci", {ci.begin(), ci.end()}, scene.truth)) << "\n";
      if (method != "ci")
        csv << to_csv_row(evaluate(seed, spec.n_people, "spring", {spring.begin(), spring.end()}, scene.truth))
            << "\n";
    }
    if (out.empty() || out == "-") {
      std::cout << csv.str();
    } else {
      const fs::path path = out;
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      std::ofstream file(path, std::ios::binary);
      if (!file) throw Error("cannot write " + out);
      file << csv.str();
    }
    return kExitOk;
  });
}

int run_render(const std::string& input, const fs::path& out, const ConfigFlags& flags)
{
  return guarded(input, [&] {
    const Config config = flags.resolve();
    Warnings warnings;
    const PoseFrame frame = read_frame(input, &warnings);
    const PixelBuffer base = load_base_image(frame, search_dir_for(input), &warnings);
    const Analysis analysis = analyze_frame(frame, config, std::move(warnings));
    print_warnings(input, analysis.report.warnings);
    fs::create_directories(out);
    write_png(out / "overlay.png", render_analysis(analysis, base, config.style));
    std::ofstream(out / "topview.svg", std::ios::binary) << render_analysis_topview(analysis);
    std::cout << (out / "overlay.png").string() << "\n" << (out / "topview.svg").string() << "\n";
    return kExitOk;
  });
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"massimo: queue alignment analysis from pose keypoints"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "run the full pipeline on keypoint files");
  std::vector<std::string> analyze_inputs;
  std::string analyze_out = "out";
  unsigned jobs = 1;
  bool validate_only = false;
  ConfigFlags analyze_cfg;
  analyze->add_option("inputs", analyze_inputs, "keypoint JSON files (- for stdin)")->required();
  analyze->add_option("--out", analyze_out, "output directory");
  analyze->add_option("--jobs,-j", jobs, "concurrent pipelines (0 = all cores)");
  analyze->add_flag("--validate-only", validate_only, "only check the keypoint schema");
  analyze_cfg.attach(analyze);

  auto* fit = app.add_subcommand("fit", "fit the queue line and print its coefficients");
  std::string fit_input;
  ConfigFlags fit_cfg;
  fit->add_option("input", fit_input, "keypoint JSON file")->required();
  fit_cfg.attach(fit);

  auto* synth = app.add_subcommand("synth", "generate a synthetic queue with known deviants");
  SceneFlags synth_scene;
  std::optional<std::uint64_t> synth_seed;
  std::string synth_out;
  synth_scene.attach(synth);
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--out", synth_out, "keypoint JSON path (truth goes to <stem>.truth.json)");

  auto* eval = app.add_subcommand("eval", "score ci and spring detection over a seed range");
  SceneFlags eval_scene;
  ConfigFlags eval_cfg;
  std::string seeds = "1..100";
  std::string method = "both";
  std::string eval_out;
  eval_scene.attach(eval);
  eval_cfg.attach(eval);
  eval->add_option("--seeds", seeds, "N, A..B or a comma list");
  eval->add_option("--method", method, "ci | spring | both");
  eval->add_option("--out", eval_out, "CSV path (default stdout)");

  auto* render = app.add_subcommand("render", "draw the overlay and top view only");
  std::string render_input;
  std::string render_out = "out";
  ConfigFlags render_cfg;
  render->add_option("input", render_input, "keypoint JSON file")->required();
  render->add_option("--out", render_out, "output directory");
  render_cfg.attach(render);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  if (analyze->parsed()) {
    if (validate_only) return run_validate(analyze_inputs);
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    return run_analyze(analyze_inputs, analyze_out, analyze_cfg, jobs);
  }
  if (fit->parsed()) return run_fit(fit_input, fit_cfg);
  if (synth->parsed()) return run_synth(synth_scene, synth_seed, synth_out);
  if (eval->parsed()) return run_eval(eval_scene, eval_cfg, seeds, method, eval_out);
  return run_render(render_input, render_out, render_cfg);
}
