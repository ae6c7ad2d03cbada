// swarmform: evolve robot swarm formations whose hull silhouette matches a
// text prompt, render formations, and score single drawings.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "swarmform/config.hpp"
#include "swarmform/image_io.hpp"
#include "swarmform/optimizer.hpp"
#include "swarmform/renderer.hpp"
#include "swarmform/scoring.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace swarmform;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 2;
constexpr int kExitScorer = 3;
constexpr int kExitIo = 4;

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_score(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct CanvasFlags {
  std::optional<int> width;
  std::optional<int> height;
  std::optional<int> margin;
  std::optional<int> dot_radius;
  std::optional<int> line_width;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--width", width, "canvas width in px");
    cmd.add_option("--height", height, "canvas height in px");
    cmd.add_option("--margin", margin, "canvas margin in px");
    cmd.add_option("--dot-radius", dot_radius, "robot dot radius in px");
    cmd.add_option("--line-width", line_width, "hull line width in px");
  }

  void apply(CanvasSpec& c) const {
    if (width) c.width_px = *width;
    if (height) c.height_px = *height;
    if (margin) c.margin_px = *margin;
    if (dot_radius) c.dot_radius_px = *dot_radius;
    if (line_width) c.line_width_px = *line_width;
  }
};

struct RunOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> prompt;
  std::optional<std::string> backend;
  std::optional<std::string> endpoint;
  std::string out_dir = "swarmform_run";
  bool early_stop = false;
  std::vector<std::string> settings;
};

void write_curve(const fs::path& path, const std::vector<Score>& curve) {
  std::ofstream out(path, std::ios::trunc);
  out << "iteration,best_score\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out << (i + 1) << ',' << format_score(curve[i]) << '\n';
  }
  if (!out) {
    throw FormatError("cannot write " + path.string());
  }
}

fs::path frame_path(const fs::path& frames_dir, std::size_t iteration) {
  char name[32];
  std::snprintf(name, sizeof(name), "iter_%04zu.png", iteration);
  return frames_dir / name;
}

int cmd_run(const RunOptions& opts) {
  RunConfig cfg;
  try {
    cfg = load_config(opts.config_path);
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.prompt) cfg.scorer.prompt = *opts.prompt;
    if (opts.backend) apply_setting(cfg, "backend", *opts.backend);
    if (opts.endpoint) cfg.scorer.endpoint = *opts.endpoint;
    if (opts.early_stop) cfg.early_stop.enabled = true;
    for (const std::string& kv : opts.settings) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(0, "--set expects key=value, got '" + kv + "'");
      }
      apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.validate();
  } catch (const ConfigError& e) {
    std::cerr << opts.config_path << ": " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << opts.config_path << ": " << e.what() << '\n';
    return kExitBadInput;
  }

  std::unique_ptr<Scorer> scorer;
  try {
    scorer = make_scorer(cfg.scorer, cfg.canvas, cfg.m, cfg.workspace);
  } catch (const std::invalid_argument& e) {
    std::cerr << "scorer: " << e.what() << '\n';
    return kExitBadInput;
  }

  const fs::path out_dir = opts.out_dir;
  const fs::path frames_dir = out_dir / "frames";
  std::error_code ec;
  fs::create_directories(frames_dir, ec);
  if (ec) {
    std::cerr << "cannot create " << frames_dir << ": " << ec.message() << '\n';
    return kExitIo;
  }

  const std::string started = utc_timestamp();
  std::string io_error;
  RunHooks hooks;
  hooks.after_iteration = [&](std::size_t iter, const Formation& champion, Score score) {
    std::cerr << "iteration " << (iter + 1) << "/" << cfg.it << " best " << format_score(score) << '\n';
    if (!io_error.empty()) {
      return;
    }
    try {
      write_png(frame_path(frames_dir, iter + 1), render(champion, cfg.canvas));
    } catch (const std::exception& e) {
      io_error = e.what();
    }
  };

  std::cerr << "population " << cfg.population_size() << " formations of " << cfg.m << " robots, "
            << cfg.it << " iterations, scorer " << scorer->identity() << '\n';
  const RunResult result = run(cfg, *scorer, hooks);

  json manifest;
  manifest["config"] = config_to_json(cfg);
  manifest["population_size"] = cfg.population_size();
  manifest["started_at"] = started;
  manifest["finished_at"] = utc_timestamp();
  manifest["backend"] = scorer->identity();
  manifest["complete"] = result.complete;
  manifest["stopped_early"] = result.stopped_early;
  manifest["iterations_run"] = result.curve.size();
  manifest["best_score"] = result.curve.empty() ? json(nullptr) : json(result.best_score);
  if (!result.complete) {
    manifest["error"] = result.error;
  }
  json artifacts = {{"manifest", "manifest.json"}, {"curve", "curve.csv"}, {"frames", "frames/iter_%04d.png"}};
  if (!result.curve.empty()) {
    artifacts["formation"] = "formation.json";
  }
  manifest["artifacts"] = artifacts;

  try {
    if (!result.curve.empty()) {
      write_formation(out_dir / "formation.json", result.best_formation);
    }
    write_curve(out_dir / "curve.csv", result.curve);
    std::ofstream mf(out_dir / "manifest.json", std::ios::trunc);
    mf << manifest.dump(2) << '\n';
    if (!mf) {
      throw FormatError("cannot write manifest.json");
    }
  } catch (const std::exception& e) {
    std::cerr << "output: " << e.what() << '\n';
    return kExitIo;
  }

  if (!result.complete) {
    std::cerr << "run aborted: " << result.error << '\n';
    return kExitScorer;
  }
  if (!io_error.empty()) {
    std::cerr << "frame output: " << io_error << '\n';
    return kExitIo;
  }
  std::cout << format_score(result.best_score) << '\n';
  return kExitOk;
}

int cmd_render(const std::string& in, const std::string& out, const CanvasFlags& flags) {
  Formation f;
  try {
    f = read_formation(in);
  } catch (const FormatError& e) {
    std::cerr << in << ": " << e.what() << '\n';
    return kExitBadInput;
  }
  CanvasSpec canvas;
  flags.apply(canvas);
  try {
    canvas.validate();
  } catch (const std::invalid_argument& e) {
    std::cerr << "canvas: " << e.what() << '\n';
    return kExitBadInput;
  }
  const HullPartition parts = partition(f);
  if (parts.hull_indices.size() < 3) {
    std::cerr << "warning: degenerate hull (" << parts.hull_indices.size()
              << " vertices); drawing robots only\n";
  }
  try {
    write_png(out, render(f, parts, canvas));
  } catch (const ImageIoError& e) {
    std::cerr << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

struct ScoreOptions {
  std::string in;
  std::optional<std::string> config_path;
  std::optional<std::string> prompt;
  std::optional<std::string> backend;
  std::optional<std::string> endpoint;
  std::optional<std::size_t> m;
  std::optional<double> target_fraction;
};

int cmd_score(const ScoreOptions& opts, const CanvasFlags& flags) {
  RunConfig cfg;
  try {
    if (opts.config_path) cfg = load_config(*opts.config_path);
    if (opts.prompt) cfg.scorer.prompt = *opts.prompt;
    if (opts.backend) apply_setting(cfg, "backend", *opts.backend);
    if (opts.endpoint) cfg.scorer.endpoint = *opts.endpoint;
    if (opts.m) cfg.m = *opts.m;
    if (opts.target_fraction) cfg.scorer.target_fraction = *opts.target_fraction;
    flags.apply(cfg.canvas);
    cfg.canvas.validate();
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kExitBadInput;
  }

  RasterImage image;
  const fs::path in = opts.in;
  try {
    if (in.extension() == ".json") {
      const Formation f = read_formation(in);
      cfg.workspace = f.workspace;
      if (!opts.m) cfg.m = f.size();
      image = render(f, cfg.canvas);
    } else {
      image = read_png(in);
    }
  } catch (const std::exception& e) {
    std::cerr << in.string() << ": " << e.what() << '\n';
    return kExitBadInput;
  }

  std::unique_ptr<Scorer> scorer;
  try {
    scorer = make_scorer(cfg.scorer, cfg.canvas, cfg.m, cfg.workspace);
  } catch (const std::invalid_argument& e) {
    std::cerr << "scorer: " << e.what() << '\n';
    return kExitBadInput;
  }
  try {
    const std::vector<Score> scores = scorer->score_batch(std::span<const RasterImage>(&image, 1));
    std::cout << format_score(scores.front()) << '\n';
  } catch (const ScorerError& e) {
    std::cerr << "scorer: " << e.what() << '\n';
    return kExitScorer;
  } catch (const std::invalid_argument& e) {
    std::cerr << "scorer: " << e.what() << '\n';
    return kExitBadInput;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Text-guided swarm formation search"};
  app.require_subcommand(1);

  RunOptions run_opts;
  CLI::App* run_cmd = app.add_subcommand("run", "evolve a formation for a prompt");
  run_cmd->add_option("--config", run_opts.config_path, "key = value config file or manifest.json")
      ->required();
  run_cmd->add_option("--seed", run_opts.seed, "RNG seed");
  run_cmd->add_option("--prompt", run_opts.prompt, "text prompt (template backend: a shape name)");
  run_cmd->add_option("--backend", run_opts.backend, "embedding | template");
  run_cmd->add_option("--endpoint", run_opts.endpoint, "embedding service base URL");
  run_cmd->add_option("--out", run_opts.out_dir, "output directory");
  run_cmd->add_flag("--early-stop", run_opts.early_stop, "stop when the best score plateaus");
  run_cmd->add_option("--set", run_opts.settings, "override any config key, key=value");

  std::string render_in;
  std::string render_out;
  CanvasFlags render_canvas;
  CLI::App* render_cmd = app.add_subcommand("render", "draw a formation file to PNG");
  render_cmd->add_option("--in", render_in, "formation.json")->required();
  render_cmd->add_option("--out", render_out, "output PNG")->required();
  render_canvas.add_to(*render_cmd);

  ScoreOptions score_opts;
  CanvasFlags score_canvas;
  CLI::App* score_cmd = app.add_subcommand("score", "score one formation or PNG against a prompt");
  score_cmd->add_option("--in", score_opts.in, "formation.json or image.png")->required();
  score_cmd->add_option("--prompt", score_opts.prompt, "text prompt (template backend: a shape name)");
  score_cmd->add_option("--config", score_opts.config_path, "config supplying scorer/canvas settings");
  score_cmd->add_option("--backend", score_opts.backend, "embedding | template");
  score_cmd->add_option("--endpoint", score_opts.endpoint, "embedding service base URL");
  score_cmd->add_option("--m", score_opts.m, "robot count of the template target");
  score_cmd->add_option("--target-fraction", score_opts.target_fraction, "template target size");
  score_canvas.add_to(*score_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  if (*run_cmd) {
    return cmd_run(run_opts);
  }
  if (*render_cmd) {
    return cmd_render(render_in, render_out, render_canvas);
  }
  return cmd_score(score_opts, score_canvas);
}
