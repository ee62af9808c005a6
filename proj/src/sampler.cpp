#include "guiflow/sampler.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "guiflow/action_space.hpp"
#include "guiflow/errors.hpp"

namespace guiflow {

void validate_config(const SamplerConfig& cfg) {
  if (cfg.min_len < 3)
    throw ConfigError("min_len must be at least 3, got " + std::to_string(cfg.min_len));
  if (cfg.min_len > cfg.max_len)
    throw ConfigError("min_len " + std::to_string(cfg.min_len) +
                      " exceeds max_len " + std::to_string(cfg.max_len));
  if (cfg.max_attempts < 1) throw ConfigError("max_attempts must be positive");
}

bool PageNameRegistry::has_name(const std::string& name) const {
  return name_to_page_.count(name) != 0;
}

const std::string* PageNameRegistry::page_for(const std::string& name) const {
  auto it = name_to_page_.find(name);
  if (it == name_to_page_.end() || it->second.empty()) return nullptr;
  return &it->second;
}

void PageNameRegistry::preload(const std::string& name) {
  name_to_page_.emplace(name, "");
}

std::string PageNameRegistry::assign(const std::string& name,
                                     const std::string& page_id) {
  std::string candidate = name;
  for (int suffix = 2;; ++suffix) {
    auto it = name_to_page_.find(candidate);
    if (it == name_to_page_.end()) {
      name_to_page_[candidate] = page_id;
      ++usage_[candidate];
      return candidate;
    }
    if (it->second == page_id) {
      ++usage_[candidate];
      return candidate;
    }
    candidate = name + " " + std::to_string(suffix);
  }
}

int PageNameRegistry::usage_count(const std::string& name) const {
  auto it = usage_.find(name);
  return it == usage_.end() ? 0 : it->second;
}

ValidationResult validate_flow(const GuiFlow& f, const GuiGraph& g,
                               const DedupRegistry& registry) {
  ValidationResult r;
  auto flag = [&r](const char* code) {
    r.ok = false;
    r.violations.push_back(code);
  };

  if (registry.paths.count(path_signature(f))) flag("V1");

  if (!f.steps.empty()) {
    bool all_seen = true;
    for (const auto& s : f.steps)
      if (!registry.actions.count(action_signature(s.action))) {
        all_seen = false;
        break;
      }
    if (all_seen) flag("V2");
  }

  for (std::size_t i = 0; i + 1 < f.steps.size(); ++i)
    if (f.steps[i].action == f.steps[i + 1].action) {
      flag("V3");
      break;
    }

  for (const auto& s : f.steps) {
    // A step on a page the graph does not know cannot be in that page's
    // action space either.
    if (!g.has_page(s.page_id) || !action_in_space(s.action, g.page(s.page_id))) {
      flag("V4");
      break;
    }
  }
  return r;
}

std::string page_label(const GuiPage& p) {
  if (p.caption && !p.caption->empty()) {
    const std::string& c = *p.caption;
    std::size_t dot = c.find('.');
    return dot == std::string::npos ? c : c.substr(0, dot);
  }
  return p.page_id;
}

namespace {

std::string action_verb(const Action& a) {
  switch (a.kind) {
    case ActionKind::Click:
      if (a.element_name.empty())
        return "click the element at " + bbox_to_string(a.bounds);
      return "click \"" + a.element_name + "\"";
    case ActionKind::Scroll: {
      std::string v = "scroll " + to_string(*a.direction);
      if (!a.element_name.empty()) v += " on \"" + a.element_name + "\"";
      return v;
    }
    case ActionKind::Input:
      return "input \"" + a.input_text.value_or("") + "\" into \"" +
             a.element_name + "\"";
    case ActionKind::Complete:
      return "complete the task";
  }
  return "act";
}

}  // namespace

std::string describe_step(const GuiGraph& g, const FlowStep& s) {
  std::string label =
      g.has_page(s.page_id) ? page_label(g.page(s.page_id)) : s.page_id;
  return "On the " + label + ", " + action_verb(s.action) + ".";
}

std::pair<std::string, std::vector<std::string>>
TemplateTaskTextGenerator::generate(const GuiFlow& f, const GuiGraph& g) const {
  std::vector<std::string> descriptions;
  descriptions.reserve(f.steps.size());
  for (const auto& s : f.steps) descriptions.push_back(describe_step(g, s));

  std::string start = f.steps.empty()
                          ? f.terminal_page
                          : (g.has_page(f.steps.front().page_id)
                                 ? page_label(g.page(f.steps.front().page_id))
                                 : f.steps.front().page_id);
  std::string end = g.has_page(f.terminal_page)
                        ? page_label(g.page(f.terminal_page))
                        : f.terminal_page;
  std::string brief = "From the " + start + ", ";
  for (std::size_t i = 0; i < f.steps.size() && i < 2; ++i) {
    if (i > 0) brief += ", then ";
    brief += action_verb(f.steps[i].action);
  }
  brief += ", and reach the " + end + " in " + std::to_string(f.steps.size()) +
           " steps.";
  return {brief, descriptions};
}

FlowSampler::FlowSampler(const GuiGraph& g, SamplerConfig cfg)
    : g_(g), cfg_(cfg), rng_(cfg.seed) {
  validate_config(cfg_);
}

bool FlowSampler::can_walk(const std::string& page, int remaining) {
  if (remaining <= 0) return true;
  auto key = std::make_pair(page, remaining);
  auto it = walk_memo_.find(key);
  if (it != walk_memo_.end()) return it->second;
  // Recursion always decreases `remaining`, so the memo key never reenters.
  bool ok = false;
  for (std::size_t idx : g_.outgoing(page))
    if (can_walk(g_.edges()[idx].dst, remaining - 1)) {
      ok = true;
      break;
    }
  walk_memo_[key] = ok;
  return ok;
}

bool FlowSampler::try_walk(int len, GuiFlow* out) {
  GuiFlow f;
  std::string cur = g_.home();
  for (int i = 0; i < len; ++i) {
    const auto& options = g_.outgoing(cur);
    if (options.empty()) return false;
    const GraphEdge& e = g_.edges()[options[rng_() % options.size()]];
    f.steps.push_back(FlowStep{cur, e.action});
    cur = e.dst;
  }
  f.terminal_page = cur;
  *out = std::move(f);
  return true;
}

std::vector<GuiFlow> FlowSampler::sample(std::size_t n) {
  if (g_.home().empty() || !g_.has_page(g_.home()))
    throw GraphTooSmallError("graph has no home page");
  if (!can_walk(g_.home(), cfg_.min_len))
    throw GraphTooSmallError("no walk of length " + std::to_string(cfg_.min_len) +
                             " from home page " + g_.home());
  std::vector<int> feasible;
  for (int len = cfg_.min_len; len <= cfg_.max_len; ++len)
    if (can_walk(g_.home(), len)) feasible.push_back(len);

  std::vector<GuiFlow> flows;
  flows.reserve(n);
  while (flows.size() < n) {
    bool accepted = false;
    for (int attempt = 0; attempt < cfg_.max_attempts; ++attempt) {
      int len = feasible[rng_() % feasible.size()];
      GuiFlow f;
      if (!try_walk(len, &f)) continue;
      if (!validate_flow(f, g_, registry_).ok) continue;
      registry_.paths.insert(path_signature(f));
      for (const auto& s : f.steps)
        registry_.actions.insert(action_signature(s.action));
      flows.push_back(std::move(f));
      accepted = true;
      break;
    }
    if (!accepted) break;  // budget exhausted; return what we have
  }
  return flows;
}

void attach_task_text(GuiFlow* f, const GuiGraph& g,
                      const TaskTextGenerator& gen) {
  auto [brief, descriptions] = gen.generate(*f, g);
  f->task = std::move(brief);
  f->step_descriptions = std::move(descriptions);
}

std::vector<GuiFlow> filter_tasks(std::vector<GuiFlow> flows,
                                  DedupRegistry& registry,
                                  std::size_t max_task_len) {
  std::vector<GuiFlow> kept;
  kept.reserve(flows.size());
  for (auto& f : flows) {
    if (registry.tasks.count(f.task)) continue;                    // A
    if (f.step_descriptions.size() != f.steps.size()) continue;    // B
    if (f.task.size() > max_task_len) continue;                    // C
    registry.tasks.insert(f.task);
    kept.push_back(std::move(f));
  }
  return kept;
}

namespace {

struct Phrase {
  std::size_t pos = std::string::npos;
  std::string text;
};

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

// Earliest noun phrase ending in the standalone word "page" or "interface":
// the words from just after the nearest preceding article to the keyword.
Phrase find_page_phrase(const std::string& desc) {
  static const std::vector<std::string> keywords = {"page", "interface"};
  Phrase best;
  for (const auto& kw : keywords) {
    std::size_t at = 0;
    while ((at = desc.find(kw, at)) != std::string::npos) {
      bool word_start = at == 0 || !is_word_char(desc[at - 1]);
      std::size_t end = at + kw.size();
      bool word_end = end == desc.size() || !is_word_char(desc[end]);
      if (!word_start || !word_end) {
        at = end;
        continue;
      }
      // Scan back to the nearest article within the clause.
      std::size_t clause_start = 0;
      for (std::size_t i = at; i-- > 0;) {
        char c = desc[i];
        if (c == ',' || c == '.' || c == ';' || c == '!' || c == '?') {
          clause_start = i + 1;
          break;
        }
      }
      std::string clause = desc.substr(clause_start, at - clause_start);
      std::size_t article = clause.rfind("the ");
      if (article == std::string::npos) article = clause.rfind("a ");
      if (article != std::string::npos) {
        // Require the article to start a word.
        if (article == 0 || !is_word_char(clause[article - 1])) {
          std::size_t phrase_begin =
              clause_start + article + clause.substr(article).find(' ') + 1;
          std::string phrase = desc.substr(phrase_begin, end - phrase_begin);
          if (!phrase.empty() && (best.pos == std::string::npos || phrase_begin < best.pos)) {
            best.pos = phrase_begin;
            best.text = phrase;
          }
        }
      }
      at = end;
    }
  }
  return best;
}

// Earliest "..."-quoted (straight or curly) phrase.
Phrase find_quoted_phrase(const std::string& desc) {
  static const std::vector<std::pair<std::string, std::string>> quote_pairs = {
      {"\"", "\""}, {"\xe2\x80\x9c", "\xe2\x80\x9d"}, {"\xe2\x80\x9c", "\""}};
  Phrase best;
  for (const auto& [open, close] : quote_pairs) {
    std::size_t b = desc.find(open);
    if (b == std::string::npos) continue;
    std::size_t content = b + open.size();
    std::size_t e = desc.find(close, content);
    if (e == std::string::npos) continue;
    std::string text = desc.substr(content, e - content);
    if (!text.empty() && (best.pos == std::string::npos || b < best.pos)) {
      best.pos = b;
      best.text = text;
    }
  }
  return best;
}

}  // namespace

std::string name_page(const GuiPage& p, const Action& incoming,
                      const std::string& step_desc,
                      PageNameRegistry& registry) {
  // Rule 1: a page phrase or quoted phrase in the description, whichever
  // appears first.
  Phrase page_phrase = find_page_phrase(step_desc);
  Phrase quoted = find_quoted_phrase(step_desc);
  std::string name;
  if (page_phrase.pos != std::string::npos &&
      (quoted.pos == std::string::npos || page_phrase.pos <= quoted.pos))
    name = page_phrase.text;
  else if (quoted.pos != std::string::npos)
    name = quoted.text;

  // Rule 2: element name or typed text of the incoming action.
  if (name.empty()) {
    if (!incoming.element_name.empty()) name = incoming.element_name;
    else if (incoming.input_text && !incoming.input_text->empty())
      name = *incoming.input_text;
  }

  // Rule 3: caption fallback.
  if (name.empty()) name = page_label(p);

  return registry.assign(name, p.page_id);
}

}  // namespace guiflow
