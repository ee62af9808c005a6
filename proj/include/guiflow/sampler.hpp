#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "guiflow/model.hpp"

namespace guiflow {

struct SamplerConfig {
  int min_len = 3;
  int max_len = 10;
  std::uint64_t seed = 0;
  int max_attempts = 200;          // walk attempts per requested flow
  std::size_t max_task_len = 200;  // filter C cutoff, characters
};

// Throws ConfigError unless 3 <= min_len <= max_len and the counts are sane.
void validate_config(const SamplerConfig& cfg);

// Everything a sampling run has already produced, for dedup checks.
struct DedupRegistry {
  std::set<std::string> paths;    // path signatures
  std::set<std::string> tasks;    // brief task strings
  std::set<std::string> actions;  // action signatures
};

// name -> page assignments; a name maps to at most one page.
class PageNameRegistry {
 public:
  bool has_name(const std::string& name) const;
  // page_id for a name, or nullptr (unknown name, or preloaded without page).
  const std::string* page_for(const std::string& name) const;
  // Mark a name as taken without binding it to a page (corpus-known names).
  void preload(const std::string& name);
  // Bind name -> page_id, appending " 2", " 3", ... when the plain name is
  // already bound to a different page. Returns the name actually used.
  std::string assign(const std::string& name, const std::string& page_id);
  int usage_count(const std::string& name) const;

 private:
  std::map<std::string, std::string> name_to_page_;
  std::map<std::string, int> usage_;
};

struct ValidationResult {
  bool ok = true;
  std::vector<std::string> violations;  // "V1".."V4"
};

// V1 path already registered; V2 every action already registered; V3
// consecutive identical actions; V4 some action outside its page's space.
ValidationResult validate_flow(const GuiFlow& f, const GuiGraph& g,
                               const DedupRegistry& registry);

// Replaceable stand-in for the upstream pipeline's LLM annotation step.
class TaskTextGenerator {
 public:
  virtual ~TaskTextGenerator() = default;
  // (brief task, one description per step)
  virtual std::pair<std::string, std::vector<std::string>> generate(
      const GuiFlow& f, const GuiGraph& g) const = 0;
};

// Deterministic template texts: step descriptions of the form
// "On the {page label}, {verb phrase}." and a brief built from the flow
// endpoints and leading action verbs.
class TemplateTaskTextGenerator : public TaskTextGenerator {
 public:
  std::pair<std::string, std::vector<std::string>> generate(
      const GuiFlow& f, const GuiGraph& g) const override;
};

// Page label used in generated text: first caption sentence, else the id.
std::string page_label(const GuiPage& p);

// "On the {page label}, {verb phrase}." rendering of one step.
std::string describe_step(const GuiGraph& g, const FlowStep& s);

// Seeded random-walk sampler with rejection. Owns its RNG and registry, so
// one instance run twice from the same seed emits identical flows.
class FlowSampler {
 public:
  FlowSampler(const GuiGraph& g, SamplerConfig cfg);

  // Up to n validated flows (task text not yet attached). Throws
  // GraphTooSmallError when no walk of min_len leaves the home page.
  std::vector<GuiFlow> sample(std::size_t n);

  DedupRegistry& registry() { return registry_; }

 private:
  bool can_walk(const std::string& page, int remaining);
  bool try_walk(int len, GuiFlow* out);

  const GuiGraph& g_;
  SamplerConfig cfg_;
  std::mt19937_64 rng_;
  DedupRegistry registry_;
  std::map<std::pair<std::string, int>, bool> walk_memo_;
};

// Attach template task text to a flow in place.
void attach_task_text(GuiFlow* f, const GuiGraph& g,
                      const TaskTextGenerator& gen);

// Drop flows whose (A) brief task is already registered, (B) description
// count mismatches the step count, (C) brief task exceeds max_task_len.
// Surviving tasks are registered as they pass.
std::vector<GuiFlow> filter_tasks(std::vector<GuiFlow> flows,
                                  DedupRegistry& registry,
                                  std::size_t max_task_len);

// Name a page from the incoming step: (1) a page/interface noun phrase or
// quoted phrase in the step description, (2) the incoming action's element
// name or input text, (3) the caption fallback. The returned name is already
// registered (with numeric-suffix disambiguation on collision).
std::string name_page(const GuiPage& p, const Action& incoming,
                      const std::string& step_desc, PageNameRegistry& registry);

}  // namespace guiflow
