#include "swarmform/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace swarmform {

using json = nlohmann::json;

ConfigError::ConfigError(std::size_t line, const std::string& message)
    : std::runtime_error(line == 0 ? message : "line " + std::to_string(line) + ": " + message),
      line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(0, "invalid value '" + std::string(text) + "' for " + std::string(key));
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) {
      throw ConfigError(0, "non-finite value for " + std::string(key));
    }
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "on" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "off" || text == "no") return false;
  throw ConfigError(0, "invalid boolean '" + std::string(text) + "' for " + std::string(key));
}

Color parse_color(std::string_view key, std::string_view text) {
  int channels[3] = {0, 0, 0};
  std::size_t start = 0;
  for (int c = 0; c < 3; ++c) {
    const std::size_t comma = text.find(',', start);
    const bool last = c == 2;
    if (last != (comma == std::string_view::npos)) {
      throw ConfigError(0, std::string(key) + " must be three comma-separated values r,g,b");
    }
    const std::string_view part = trim(text.substr(start, last ? std::string_view::npos : comma - start));
    channels[c] = parse_number<int>(key, part);
    if (channels[c] < 0 || channels[c] > 255) {
      throw ConfigError(0, std::string(key) + " channels must lie in [0, 255]");
    }
    start = comma + 1;
  }
  return {static_cast<std::uint8_t>(channels[0]), static_cast<std::uint8_t>(channels[1]),
          static_cast<std::uint8_t>(channels[2])};
}

std::string color_text(Color c) {
  return std::to_string(c.r) + "," + std::to_string(c.g) + "," + std::to_string(c.b);
}

struct Field {
  const char* key;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<json(const RunConfig&)> get;
};

template <typename T>
Field number_field(const char* key, T RunConfig::*member) {
  return {key, [key, member](RunConfig& c, std::string_view v) { c.*member = parse_number<T>(key, v); },
          [member](const RunConfig& c) { return json(c.*member); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> t;
    t.push_back({"prompt", [](RunConfig& c, std::string_view v) { c.scorer.prompt = std::string(v); },
                 [](const RunConfig& c) { return json(c.scorer.prompt); }});
    t.push_back({"backend",
                 [](RunConfig& c, std::string_view v) {
                   const auto b = backend_from_string(v);
                   if (!b) throw ConfigError(0, "backend must be 'embedding' or 'template'");
                   c.scorer.backend = *b;
                 },
                 [](const RunConfig& c) { return json(std::string(to_string(c.scorer.backend))); }});
    t.push_back({"endpoint", [](RunConfig& c, std::string_view v) { c.scorer.endpoint = std::string(v); },
                 [](const RunConfig& c) { return json(c.scorer.endpoint); }});
    t.push_back({"threshold",
                 [](RunConfig& c, std::string_view v) { c.scorer.threshold = parse_number<int>("threshold", v); },
                 [](const RunConfig& c) { return json(c.scorer.threshold); }});
    t.push_back({"target_fraction",
                 [](RunConfig& c, std::string_view v) {
                   c.scorer.target_fraction = parse_number<double>("target_fraction", v);
                 },
                 [](const RunConfig& c) { return json(c.scorer.target_fraction); }});
    t.push_back({"scorer_parallelism",
                 [](RunConfig& c, std::string_view v) {
                   c.scorer.parallelism = parse_number<unsigned>("scorer_parallelism", v);
                 },
                 [](const RunConfig& c) { return json(c.scorer.parallelism); }});
    t.push_back({"scorer_timeout_ms",
                 [](RunConfig& c, std::string_view v) {
                   c.scorer.timeout_ms = parse_number<unsigned>("scorer_timeout_ms", v);
                 },
                 [](const RunConfig& c) { return json(c.scorer.timeout_ms); }});
    t.push_back(number_field("m", &RunConfig::m));
    t.push_back(number_field("it", &RunConfig::it));
    t.push_back(number_field("b", &RunConfig::b));
    t.push_back(number_field("k", &RunConfig::k));
    t.push_back(number_field("h", &RunConfig::h));
    t.push_back(number_field("r", &RunConfig::r));
    t.push_back(number_field("a", &RunConfig::a));
    t.push_back(number_field("lim", &RunConfig::lim));
    t.push_back(number_field("seed", &RunConfig::seed));
    t.push_back(number_field("threads", &RunConfig::threads));
    t.push_back({"xmin", [](RunConfig& c, std::string_view v) { c.workspace.xmin = parse_number<double>("xmin", v); },
                 [](const RunConfig& c) { return json(c.workspace.xmin); }});
    t.push_back({"ymin", [](RunConfig& c, std::string_view v) { c.workspace.ymin = parse_number<double>("ymin", v); },
                 [](const RunConfig& c) { return json(c.workspace.ymin); }});
    t.push_back({"xmax", [](RunConfig& c, std::string_view v) { c.workspace.xmax = parse_number<double>("xmax", v); },
                 [](const RunConfig& c) { return json(c.workspace.xmax); }});
    t.push_back({"ymax", [](RunConfig& c, std::string_view v) { c.workspace.ymax = parse_number<double>("ymax", v); },
                 [](const RunConfig& c) { return json(c.workspace.ymax); }});
    t.push_back({"canvas_width",
                 [](RunConfig& c, std::string_view v) { c.canvas.width_px = parse_number<int>("canvas_width", v); },
                 [](const RunConfig& c) { return json(c.canvas.width_px); }});
    t.push_back({"canvas_height",
                 [](RunConfig& c, std::string_view v) { c.canvas.height_px = parse_number<int>("canvas_height", v); },
                 [](const RunConfig& c) { return json(c.canvas.height_px); }});
    t.push_back({"canvas_margin",
                 [](RunConfig& c, std::string_view v) { c.canvas.margin_px = parse_number<int>("canvas_margin", v); },
                 [](const RunConfig& c) { return json(c.canvas.margin_px); }});
    t.push_back({"dot_radius",
                 [](RunConfig& c, std::string_view v) { c.canvas.dot_radius_px = parse_number<int>("dot_radius", v); },
                 [](const RunConfig& c) { return json(c.canvas.dot_radius_px); }});
    t.push_back({"line_width",
                 [](RunConfig& c, std::string_view v) { c.canvas.line_width_px = parse_number<int>("line_width", v); },
                 [](const RunConfig& c) { return json(c.canvas.line_width_px); }});
    t.push_back({"background",
                 [](RunConfig& c, std::string_view v) { c.canvas.background = parse_color("background", v); },
                 [](const RunConfig& c) { return json(color_text(c.canvas.background)); }});
    t.push_back({"ink", [](RunConfig& c, std::string_view v) { c.canvas.ink = parse_color("ink", v); },
                 [](const RunConfig& c) { return json(color_text(c.canvas.ink)); }});
    t.push_back({"early_stop",
                 [](RunConfig& c, std::string_view v) { c.early_stop.enabled = parse_bool("early_stop", v); },
                 [](const RunConfig& c) { return json(c.early_stop.enabled); }});
    t.push_back({"early_stop_delta",
                 [](RunConfig& c, std::string_view v) {
                   c.early_stop.delta = parse_number<double>("early_stop_delta", v);
                 },
                 [](const RunConfig& c) { return json(c.early_stop.delta); }});
    t.push_back({"early_stop_patience",
                 [](RunConfig& c, std::string_view v) {
                   c.early_stop.patience = parse_number<std::size_t>("early_stop_patience", v);
                 },
                 [](const RunConfig& c) { return json(c.early_stop.patience); }});
    return t;
  }();
  return table;
}

const Field* find_field(std::string_view key) {
  for (const Field& f : fields()) {
    if (key == f.key) {
      return &f;
    }
  }
  return nullptr;
}

// Messages from RunConfig::validate start with the field name; point at the
// line that set it when there is one.
void validate_or_throw(const RunConfig& cfg, const std::map<std::string, std::size_t, std::less<>>& key_lines = {}) {
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    const std::string_view msg = e.what();
    const auto it = key_lines.find(msg.substr(0, msg.find(' ')));
    throw ConfigError(it == key_lines.end() ? 0 : it->second, e.what());
  }
}

}  // namespace

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
  const Field* f = find_field(key);
  if (f == nullptr) {
    throw ConfigError(0, "unknown key '" + std::string(key) + "'");
  }
  f->set(cfg, value);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const Field& f : fields()) {
    out.emplace_back(f.key);
  }
  return out;
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::map<std::string, std::size_t, std::less<>> key_lines;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(line_no, "expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    try {
      apply_setting(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(line_no, e.what());
    }
    key_lines[std::string(key)] = line_no;
  }
  validate_or_throw(cfg, key_lines);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(0, "cannot read config file " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const std::string_view body = trim(text);
  if (!body.empty() && body.front() == '{') {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::exception& e) {
      throw ConfigError(0, std::string("invalid JSON config: ") + e.what());
    }
    if (doc.contains("config") && doc["config"].is_object()) {
      return config_from_json(doc["config"]);
    }
    return config_from_json(doc);
  }
  return parse_config(text);
}

json config_to_json(const RunConfig& cfg) {
  json out = json::object();
  for (const Field& f : fields()) {
    out[f.key] = f.get(cfg);
  }
  return out;
}

RunConfig config_from_json(const json& doc) {
  if (!doc.is_object()) {
    throw ConfigError(0, "config JSON must be an object");
  }
  RunConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_boolean()) {
      text = value.get<bool>() ? "true" : "false";
    } else if (value.is_number()) {
      // dump() gives the shortest form that round-trips.
      text = value.dump();
    } else {
      throw ConfigError(0, "unsupported JSON value for " + key);
    }
    apply_setting(cfg, key, text);
  }
  validate_or_throw(cfg);
  return cfg;
}

json formation_to_json(const Formation& f) {
  json robots = json::array();
  for (const Point2& p : f.positions) {
    robots.push_back({p.x, p.y});
  }
  return {{"workspace",
           {{"xmin", f.workspace.xmin}, {"ymin", f.workspace.ymin}, {"xmax", f.workspace.xmax},
            {"ymax", f.workspace.ymax}}},
          {"robots", std::move(robots)}};
}

Formation formation_from_json(const json& doc) {
  Formation f;
  try {
    const json& ws = doc.at("workspace");
    f.workspace = {ws.at("xmin").get<double>(), ws.at("ymin").get<double>(), ws.at("xmax").get<double>(),
                   ws.at("ymax").get<double>()};
    const json& robots = doc.at("robots");
    if (!robots.is_array()) {
      throw FormatError("\"robots\" must be an array");
    }
    for (const json& r : robots) {
      if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
        throw FormatError("each robot must be a [x, y] pair of numbers");
      }
      f.positions.push_back({r[0].get<double>(), r[1].get<double>()});
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed formation: ") + e.what());
  }
  if (f.positions.empty()) {
    throw FormatError("formation has no robots");
  }
  try {
    validate(f);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return f;
}

void write_formation(const std::filesystem::path& path, const Formation& f) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw FormatError("cannot write " + path.string());
  }
  out << formation_to_json(f).dump(2) << '\n';
  if (!out) {
    throw FormatError("short write to " + path.string());
  }
}

Formation read_formation(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw FormatError("cannot read " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(std::string("invalid JSON in ") + path.string() + ": " + e.what());
  }
  return formation_from_json(doc);
}

}  // namespace swarmform
