#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "guiflow/model.hpp"

namespace guiflow {

// All serialization goes through ordered_json so emitted key order (and
// therefore output bytes) is deterministic.
using json = nlohmann::ordered_json;

json action_to_json(const Action& a);
Action action_from_json(const json& j);

json flow_to_json(const GuiFlow& f);
GuiFlow flow_from_json(const json& j);

json subtask_to_json(const SubtaskSpec& s);
SubtaskSpec subtask_from_json(const json& j);

// Copy top-level keys of `src` that `dst` does not define onto `dst`, so
// foreign fields survive a read-modify-write cycle.
json preserve_unknown(const json& src, json dst);

// Graph container format (single JSON document with pages/edges tables).
json graph_to_json(const GuiGraph& g);
GuiGraph graph_from_json(const json& j);
GuiGraph load_graph(const std::string& path);
void save_graph(const std::string& path, const GuiGraph& g);

// JSONL: one object per line, UTF-8, '\n' terminated. Parse errors carry the
// 1-based line number.
std::vector<json> read_jsonl(const std::string& path);
void write_jsonl(const std::string& path, const std::vector<json>& records);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Strip leading and trailing ASCII whitespace.
std::string trim(const std::string& s);

// Hex SHA-256 of a byte string / of a file's contents.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

// Flat "key = value" config document. '#' starts a comment; blank lines are
// skipped; duplicate keys are an error.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> load_config(const std::string& path);

// Typed lookups with defaults; throw ConfigError on unparseable values.
std::string config_str(const std::map<std::string, std::string>& cfg,
                       const std::string& key, const std::string& fallback);
long long config_int(const std::map<std::string, std::string>& cfg,
                     const std::string& key, long long fallback);
double config_double(const std::map<std::string, std::string>& cfg,
                     const std::string& key, double fallback);
bool config_bool(const std::map<std::string, std::string>& cfg,
                 const std::string& key, bool fallback);

// Reproducibility record written next to every command's outputs. Carries no
// wall-clock fields on purpose: two runs with equal inputs must produce equal
// manifests.
struct RunManifest {
  std::string command;
  std::string tool_version;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> config;   // resolved key -> value
  std::map<std::string, std::string> inputs;   // path -> sha256
  std::map<std::string, std::string> outputs;  // path -> sha256
};

json manifest_to_json(const RunManifest& m);
void write_manifest(const std::string& path, const RunManifest& m);

}  // namespace guiflow
