#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "swarmform/config.hpp"

using namespace swarmform;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& contents) {
  const fs::path dir = fs::temp_directory_path() / "swarmform_test_config";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << contents;
  return p;
}

}  // namespace

TEST_CASE("parse_config: defaults, overrides, comments") {
  const RunConfig cfg = parse_config(R"(
# a comment
prompt = "A hexagon"
backend = template
m = 30
lim = 0.75
xmin = -5
xmax = 5
ymin = -2
ymax = 8
seed = 99
ink = 10,20,30
early_stop = true
early_stop_patience = 4
m = 31
)");
  CHECK(cfg.scorer.prompt == "A hexagon");
  CHECK(cfg.scorer.backend == Backend::template_iou);
  CHECK(cfg.m == 31);
  CHECK(cfg.lim == 0.75);
  CHECK(cfg.workspace == Rect{-5, -2, 5, 8});
  CHECK(cfg.seed == 99);
  CHECK(cfg.canvas.ink == Color{10, 20, 30});
  CHECK(cfg.early_stop.enabled);
  CHECK(cfg.early_stop.patience == 4);
  CHECK(cfg.b == RunConfig{}.b);
  CHECK(parse_config("").population_size() == 1600);
}

TEST_CASE("parse_config: errors carry the line number") {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("m = 10\nbogus = 3\n") == 2);
  CHECK(line_of("m = 10\n\n# c\nm = ten\n") == 4);
  CHECK(line_of("no equals sign here") == 1);
  CHECK(line_of("lim = -1") == 1);
  CHECK(line_of("backend = quantum") == 1);
  CHECK(line_of("ink = 1,2") == 1);
  try {
    parse_config("m = 10\nbogus = 3\n");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("parse_config: invalid combinations are rejected after parsing") {
  CHECK_THROWS_AS(parse_config("xmin = 5\nxmax = 5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("m = 2\n"), ConfigError);
}

TEST_CASE("apply_setting knows every listed key") {
  RunConfig cfg;
  for (const std::string& key : config_keys()) {
    CAPTURE(key);
    // Just check that the key is recognized; a bad value still names the key.
    try {
      apply_setting(cfg, key, "definitely not valid !!");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("unknown") == std::string::npos);
    }
  }
  CHECK_THROWS_AS(apply_setting(cfg, "nope", "1"), ConfigError);
}

TEST_CASE("config JSON echo round-trips exactly") {
  RunConfig cfg;
  cfg.scorer.prompt = "inverted triangle";
  cfg.scorer.backend = Backend::template_iou;
  cfg.scorer.endpoint = "http://10.0.0.2:9000";
  cfg.scorer.target_fraction = 0.6125;
  cfg.lim = 0.1 + 0.2;  // not exactly representable in short decimal
  cfg.workspace = {-1.0 / 3.0, 0.0, 7.0 / 3.0, 12.5};
  cfg.seed = std::numeric_limits<std::uint64_t>::max();
  cfg.canvas = CanvasSpec{320, 200, 10, 5, 7, {250, 240, 230}, {1, 2, 3}};
  cfg.early_stop = {true, 3e-5, 7};
  cfg.threads = 3;
  cfg.scorer.timeout_ms = 1234;
  const RunConfig back = config_from_json(nlohmann::json::parse(config_to_json(cfg).dump()));
  CHECK(back == cfg);
}

TEST_CASE("load_config: key-value file, JSON object, manifest") {
  RunConfig cfg;
  cfg.m = 17;
  cfg.scorer.prompt = "square";
  const fs::path kv = temp_file("a.cfg", "m = 17\nprompt = square\n");
  CHECK(load_config(kv) == cfg);
  const fs::path js = temp_file("b.json", config_to_json(cfg).dump(2));
  CHECK(load_config(js) == cfg);
  const nlohmann::json manifest{{"config", config_to_json(cfg)}, {"best_score", 0.5}};
  const fs::path mf = temp_file("manifest.json", manifest.dump());
  CHECK(load_config(mf) == cfg);
  CHECK_THROWS(load_config(fs::temp_directory_path() / "swarmform_test_config" / "missing.cfg"));
}

TEST_CASE("formation JSON round-trips bit for bit") {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> u(-3, 11);
  Formation f;
  f.workspace = {-3, -3, 11, 11};
  for (int i = 0; i < 70; ++i) f.positions.push_back({u(gen), u(gen)});
  CHECK(formation_from_json(nlohmann::json::parse(formation_to_json(f).dump())) == f);
  const fs::path p = fs::temp_directory_path() / "swarmform_test_config" / "formation.json";
  write_formation(p, f);
  CHECK(read_formation(p) == f);
}

TEST_CASE("formation JSON: malformed documents raise FormatError") {
  using nlohmann::json;
  CHECK_THROWS_AS(formation_from_json(json::parse(R"({"robots":[[1,2]]})")), FormatError);
  CHECK_THROWS_AS(formation_from_json(json::parse(R"({"workspace":{"xmin":0,"ymin":0,"xmax":1,"ymax":1},"robots":[[1]]})")),
                  FormatError);
  CHECK_THROWS_AS(formation_from_json(json::parse(R"({"workspace":{"xmin":0,"ymin":0,"xmax":1,"ymax":1},"robots":[[5,5]]})")),
                  FormatError);
  CHECK_THROWS_AS(formation_from_json(json::parse(R"([1,2,3])")), FormatError);
}
