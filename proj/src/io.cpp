#include "guiflow/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "guiflow/action_space.hpp"
#include "guiflow/errors.hpp"

namespace guiflow {

namespace {

json bounds_to_json(const BoundingBox& b) {
  return json::array({b.x1, b.y1, b.x2, b.y2});
}

BoundingBox bounds_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4)
    throw DataError("bounds must be a 4-element array, got " + j.dump());
  BoundingBox b{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
  if (!bbox_valid(b)) throw DataError("invalid bounds " + bbox_to_string(b));
  return b;
}

std::string require_string(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string())
    throw DataError(std::string("missing or non-string field '") + key +
                    "' in " + j.dump());
  return j[key].get<std::string>();
}

const json& require_field(const json& j, const char* key) {
  if (!j.contains(key))
    throw DataError(std::string("missing field '") + key + "' in " + j.dump());
  return j.at(key);
}

}  // namespace

json action_to_json(const Action& a) {
  json j;
  j["kind"] = to_string(a.kind);
  switch (a.kind) {
    case ActionKind::Complete:
      j["text"] = a.complete_text.value_or("");
      return j;
    case ActionKind::Click:
      break;
    case ActionKind::Scroll:
      break;
    case ActionKind::Input:
      break;
  }
  j["name"] = a.element_name;
  j["bounds"] = bounds_to_json(a.bounds);
  if (a.kind == ActionKind::Scroll) j["direction"] = to_string(*a.direction);
  if (a.kind == ActionKind::Input) j["text"] = a.input_text.value_or("");
  return j;
}

Action action_from_json(const json& j) {
  if (!j.is_object()) throw DataError("action must be an object, got " + j.dump());
  ActionKind kind = action_kind_from_string(require_string(j, "kind"));
  switch (kind) {
    case ActionKind::Complete:
      return Action::complete(j.value("text", std::string()));
    case ActionKind::Click:
      return Action::click(require_string(j, "name"), bounds_from_json(require_field(j, "bounds")));
    case ActionKind::Scroll:
      return Action::scroll(require_string(j, "name"), bounds_from_json(require_field(j, "bounds")),
                            scroll_direction_from_string(require_string(j, "direction")));
    case ActionKind::Input:
      if (!j.contains("text"))
        throw DataError("input action without text: " + j.dump());
      return Action::input(require_string(j, "name"), bounds_from_json(require_field(j, "bounds")),
                           require_string(j, "text"));
  }
  throw DataError("unreachable action kind");
}

json flow_to_json(const GuiFlow& f) {
  json j;
  j["task"] = f.task;
  json steps = json::array();
  for (const auto& s : f.steps) {
    json step;
    step["page"] = s.page_id;
    step["action"] = action_to_json(s.action);
    steps.push_back(std::move(step));
  }
  j["steps"] = std::move(steps);
  if (!f.step_descriptions.empty()) j["descriptions"] = f.step_descriptions;
  j["terminal"] = f.terminal_page;
  return j;
}

GuiFlow flow_from_json(const json& j) {
  if (!j.is_object()) throw DataError("flow must be an object, got " + j.dump());
  GuiFlow f;
  f.task = require_string(j, "task");
  if (!j.contains("steps") || !j["steps"].is_array())
    throw DataError("flow without steps array: " + j.dump());
  for (const auto& step : j["steps"]) {
    FlowStep s;
    s.page_id = require_string(step, "page");
    s.action = action_from_json(step.at("action"));
    f.steps.push_back(std::move(s));
  }
  if (j.contains("descriptions")) {
    for (const auto& d : j["descriptions"])
      f.step_descriptions.push_back(d.get<std::string>());
  }
  f.terminal_page = require_string(j, "terminal");
  return f;
}

json subtask_to_json(const SubtaskSpec& s) {
  json j;
  j["kind"] = to_string(s.kind);
  j["target_page"] = s.target_page;
  j["task_text"] = s.task_text;
  if (s.required_action) j["action"] = action_to_json(*s.required_action);
  j["flow"] = flow_to_json(s.flow);
  return j;
}

SubtaskSpec subtask_from_json(const json& j) {
  SubtaskSpec s;
  s.kind = subtask_kind_from_string(require_string(j, "kind"));
  s.target_page = require_string(j, "target_page");
  s.task_text = require_string(j, "task_text");
  if (j.contains("action")) s.required_action = action_from_json(j["action"]);
  if (s.kind == SubtaskKind::Operate && !s.required_action)
    throw DataError("operate subtask without action: " + j.dump());
  if (j.contains("flow")) s.flow = flow_from_json(j["flow"]);
  return s;
}

json preserve_unknown(const json& src, json dst) {
  if (!src.is_object() || !dst.is_object()) return dst;
  for (const auto& [key, value] : src.items())
    if (!dst.contains(key)) dst[key] = value;
  return dst;
}

json graph_to_json(const GuiGraph& g) {
  json j;
  j["version"] = 1;
  json pages = json::array();
  for (const auto& [id, p] : g.pages()) {
    json pj;
    pj["page_id"] = id;
    pj["screen"] = json::array({p.screen.width, p.screen.height});
    pj["xml"] = p.xml;
    if (p.screenshot_ref) pj["screenshot_ref"] = *p.screenshot_ref;
    if (p.caption) pj["caption"] = *p.caption;
    pages.push_back(std::move(pj));
  }
  j["home"] = g.home();
  j["pages"] = std::move(pages);
  json edges = json::array();
  for (const auto& e : g.edges()) {
    json ej;
    ej["src"] = e.src;
    ej["action"] = action_to_json(e.action);
    ej["dst"] = e.dst;
    edges.push_back(std::move(ej));
  }
  j["edges"] = std::move(edges);
  return j;
}

GuiGraph graph_from_json(const json& j) {
  if (!j.is_object() || !j.contains("pages") || !j.contains("edges"))
    throw DataError("graph file must contain pages and edges tables");
  int version = j.value("version", 0);
  if (version != 1)
    throw DataError("unsupported graph file version " + std::to_string(version));
  GuiGraph g;
  for (const auto& pj : j["pages"]) {
    GuiPage p;
    p.page_id = require_string(pj, "page_id");
    const auto& screen = pj.at("screen");
    p.screen = ScreenSize{screen.at(0).get<int>(), screen.at(1).get<int>()};
    if (p.screen.width <= 0 || p.screen.height <= 0)
      throw DataError("page " + p.page_id + " has non-positive screen size");
    p.xml = require_string(pj, "xml");
    if (pj.contains("screenshot_ref"))
      p.screenshot_ref = pj["screenshot_ref"].get<std::string>();
    if (pj.contains("caption")) p.caption = pj["caption"].get<std::string>();
    p.elements = parse_page_xml(p.xml, p.screen, nullptr);
    g.add_page(std::move(p));
  }
  for (const auto& ej : j["edges"]) {
    GraphEdge e;
    e.src = require_string(ej, "src");
    e.action = action_from_json(ej.at("action"));
    e.dst = require_string(ej, "dst");
    g.add_edge(std::move(e));
  }
  g.set_home(require_string(j, "home"));
  return g;
}

GuiGraph load_graph(const std::string& path) {
  std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("graph file " + path + " is not valid JSON: " + e.what());
  }
  return graph_from_json(j);
}

void save_graph(const std::string& path, const GuiGraph& g) {
  write_file(path, graph_to_json(g).dump(2) + "\n");
}

std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::vector<json> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      records.push_back(json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": bad JSONL record: " + e.what());
    }
  }
  return records;
}

void write_jsonl(const std::string& path, const std::vector<json>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  for (const auto& r : records) out << r.dump() << '\n';
  if (!out) throw DataError("write failed for " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  out << content;
  if (!out) throw DataError("write failed for " + path);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr))
    throw Error("sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string sha256_file(const std::string& path) {
  return sha256_hex(read_file(path));
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        " is not 'key = value': " + t);
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + " has empty key");
    if (!cfg.emplace(key, value).second)
      throw ConfigError("duplicate config key: " + key);
  }
  return cfg;
}

std::map<std::string, std::string> load_config(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return parse_config_text(text);
}

std::string config_str(const std::map<std::string, std::string>& cfg,
                       const std::string& key, const std::string& fallback) {
  auto it = cfg.find(key);
  return it == cfg.end() ? fallback : it->second;
}

long long config_int(const std::map<std::string, std::string>& cfg,
                     const std::string& key, long long fallback) {
  auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  try {
    std::size_t pos = 0;
    long long v = std::stoll(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not an integer: " + it->second);
  }
}

double config_double(const std::map<std::string, std::string>& cfg,
                     const std::string& key, double fallback) {
  auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  try {
    std::size_t pos = 0;
    double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not a number: " + it->second);
  }
}

bool config_bool(const std::map<std::string, std::string>& cfg,
                 const std::string& key, bool fallback) {
  auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ConfigError("config key '" + key + "' is not a boolean: " + it->second);
}

json manifest_to_json(const RunManifest& m) {
  json j;
  j["command"] = m.command;
  j["tool_version"] = m.tool_version;
  j["seed"] = m.seed;
  j["config"] = json(m.config);
  j["inputs"] = json(m.inputs);
  j["outputs"] = json(m.outputs);
  return j;
}

void write_manifest(const std::string& path, const RunManifest& m) {
  write_file(path, manifest_to_json(m).dump(2) + "\n");
}

}  // namespace guiflow
