#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "swarmform/config.hpp"
#include "swarmform/image_io.hpp"

using namespace swarmform;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path work_dir() {
  const fs::path d = fs::temp_directory_path() / "swarmform_test_cli";
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli(const std::string& args) {
  static int counter = 0;
  const fs::path out = work_dir() / ("stdout_" + std::to_string(counter));
  const fs::path err = work_dir() / ("stderr_" + std::to_string(counter++));
  const std::string cmd = std::string("\"") + SWARMFORM_CLI + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                          err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Outcome o;
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.out = slurp(out);
  o.err = slurp(err);
  return o;
}

fs::path write_text(const std::string& name, const std::string& text) {
  const fs::path p = work_dir() / name;
  std::ofstream(p) << text;
  return p;
}

const char* kSmallConfig = R"(backend = template
prompt = square
m = 10
it = 4
b = 3
a = 2
h = 1
k = 6
r = 5
lim = 0.5
xmax = 10
ymax = 10
threads = 2
)";

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("cli run: artifacts, curve rows, manifest") {
  const fs::path cfg = write_text("small.cfg", kSmallConfig);
  const fs::path out = work_dir() / "run_a";
  fs::remove_all(out);
  const Outcome o = cli("run --config \"" + cfg.string() + "\" --seed 5 --out \"" + out.string() + "\"");
  REQUIRE(o.code == 0);
  CHECK(fs::exists(out / "formation.json"));
  CHECK(fs::exists(out / "frames" / "iter_0001.png"));
  CHECK(fs::exists(out / "frames" / "iter_0004.png"));
  const std::string curve = slurp(out / "curve.csv");
  CHECK(curve.rfind("iteration,best_score\n", 0) == 0);
  CHECK(count_lines(curve) == 5);
  const json manifest = json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["complete"] == true);
  CHECK(manifest["iterations_run"] == 4);
  CHECK(manifest["config"]["seed"] == 5);
  CHECK(manifest["population_size"] == 3 + 2 * 3 + 1 * 3 + 6 + 5);
  // stdout carries the best score, which equals the last curve value
  const double printed = std::stod(o.out);
  CHECK(printed == manifest["best_score"].get<double>());
}

TEST_CASE("cli run: it = 1 writes one curve row") {
  const fs::path cfg = write_text("one.cfg", kSmallConfig);
  const fs::path out = work_dir() / "run_one";
  fs::remove_all(out);
  REQUIRE(cli("run --config \"" + cfg.string() + "\" --set it=1 --out \"" + out.string() + "\"").code == 0);
  CHECK(count_lines(slurp(out / "curve.csv")) == 2);
}

TEST_CASE("cli run: same seed gives byte-identical formation and curve") {
  const fs::path cfg = write_text("repro.cfg", kSmallConfig);
  const fs::path a = work_dir() / "repro_a", b = work_dir() / "repro_b";
  fs::remove_all(a);
  fs::remove_all(b);
  REQUIRE(cli("run --config \"" + cfg.string() + "\" --seed 11 --out \"" + a.string() + "\"").code == 0);
  REQUIRE(cli("run --config \"" + cfg.string() + "\" --seed 11 --set threads=1 --out \"" + b.string() + "\"").code ==
          0);
  CHECK(slurp(a / "formation.json") == slurp(b / "formation.json"));
  CHECK(slurp(a / "curve.csv") == slurp(b / "curve.csv"));
}

TEST_CASE("cli run: a manifest reruns the same configuration") {
  const fs::path cfg = write_text("rerun.cfg", kSmallConfig);
  const fs::path a = work_dir() / "rerun_a", b = work_dir() / "rerun_b";
  fs::remove_all(a);
  fs::remove_all(b);
  REQUIRE(cli("run --config \"" + cfg.string() + "\" --seed 2 --out \"" + a.string() + "\"").code == 0);
  REQUIRE(cli("run --config \"" + (a / "manifest.json").string() + "\" --out \"" + b.string() + "\"").code == 0);
  CHECK(slurp(a / "formation.json") == slurp(b / "formation.json"));
}

TEST_CASE("cli run: default parameters report a population of 1600") {
  // Full default population, one iteration, small m to keep it quick.
  const fs::path cfg = write_text("defaults.cfg", "backend = template\nprompt = circle\nit = 1\nm = 8\n");
  const fs::path out = work_dir() / "run_defaults";
  fs::remove_all(out);
  REQUIRE(cli("run --config \"" + cfg.string() + "\" --out \"" + out.string() + "\"").code == 0);
  CHECK(json::parse(slurp(out / "manifest.json"))["population_size"] == 1600);
}

TEST_CASE("cli run: invalid input exits 2") {
  const fs::path bad = write_text("bad.cfg", "m = 10\nbogus = 1\n");
  const Outcome o = cli("run --config \"" + bad.string() + "\" --out \"" + (work_dir() / "bad").string() + "\"");
  CHECK(o.code == 2);
  CHECK(o.err.find("line 2") != std::string::npos);
  CHECK(cli("run --config \"" + (work_dir() / "nope.cfg").string() + "\"").code == 2);
  const fs::path cfg = write_text("noshape.cfg", kSmallConfig);
  CHECK(cli("run --config \"" + cfg.string() + "\" --prompt \"a dog\" --out \"" + (work_dir() / "dog").string() +
            "\"")
            .code == 2);
  CHECK(cli("frobnicate").code == 2);
}

TEST_CASE("cli run: unreachable embedding service exits 3 with an incomplete manifest") {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  const fs::path cfg = write_text("embed.cfg", std::string(kSmallConfig) + "backend = embedding\nscorer_timeout_ms = 300\n");
  const fs::path out = work_dir() / "run_down";
  fs::remove_all(out);
  const Outcome o = cli("run --config \"" + cfg.string() + "\" --endpoint http://127.0.0.1:" + std::to_string(port) +
                        " --out \"" + out.string() + "\"");
  CHECK(o.code == 3);
  const json manifest = json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["complete"] == false);
  CHECK(manifest["error"].get<std::string>().size() > 0);
}

TEST_CASE("cli render: reproduces the last frame byte for byte") {
  const fs::path cfg = write_text("render.cfg", kSmallConfig);
  const fs::path out = work_dir() / "run_render";
  fs::remove_all(out);
  REQUIRE(cli("run --config \"" + cfg.string() + "\" --out \"" + out.string() + "\"").code == 0);
  // The last frame shows the last iteration's champion; with elitism it is the best formation.
  const fs::path png = work_dir() / "rendered.png";
  REQUIRE(cli("render --in \"" + (out / "formation.json").string() + "\" --out \"" + png.string() + "\"").code == 0);
  CHECK(slurp(png) == slurp(out / "frames" / "iter_0004.png"));
}

TEST_CASE("cli render: collinear robots draw dots and warn") {
  Formation f{{{1, 5}, {5, 5}, {9, 5}}, {0, 0, 10, 10}};
  const fs::path in = work_dir() / "line.json";
  write_formation(in, f);
  const fs::path png = work_dir() / "line.png";
  const Outcome o = cli("render --in \"" + in.string() + "\" --out \"" + png.string() + "\"");
  CHECK(o.code == 0);
  CHECK(o.err.find("degenerate") != std::string::npos);
  const RasterImage img = read_png(png);
  CHECK(rasterize_mask(img).count() == 3 * 37);
}

TEST_CASE("cli render: bad formation file exits 2") {
  const fs::path in = write_text("broken.json", "{\"robots\": 3}");
  CHECK(cli("render --in \"" + in.string() + "\" --out \"" + (work_dir() / "x.png").string() + "\"").code == 2);
}

TEST_CASE("cli score: the template target itself scores 1") {
  const Rect ws{0, 0, 10, 10};
  const fs::path in = work_dir() / "target.json";
  write_formation(in, {predefined_formation(Shape::hexagon, 30, ws, 0.65).positions, ws});
  const Outcome o = cli("score --in \"" + in.string() + "\" --backend template --prompt hexagon");
  REQUIRE(o.code == 0);
  CHECK(std::stod(o.out) == 1.0);

  const fs::path png = work_dir() / "target.png";
  REQUIRE(cli("render --in \"" + in.string() + "\" --out \"" + png.string() + "\"").code == 0);
  const Outcome p = cli("score --in \"" + png.string() + "\" --backend template --prompt hexagon --m 30");
  REQUIRE(p.code == 0);
  CHECK(std::stod(p.out) == 1.0);
  const Outcome other = cli("score --in \"" + png.string() + "\" --backend template --prompt square --m 30");
  REQUIRE(other.code == 0);
  CHECK(std::stod(other.out) < 1.0);
}
