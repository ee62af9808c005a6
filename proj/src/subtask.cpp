#include "guiflow/subtask.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "guiflow/errors.hpp"

namespace guiflow {

double page_similarity(const GuiPage& a, const GuiPage& b) {
  auto signatures = [](const GuiPage& p) {
    std::set<std::string> sigs;
    for (const Element& e : p.elements)
      sigs.insert(e.id + "\x1f" + e.name + "\x1f" + bbox_to_string(e.bounds));
    return sigs;
  };
  std::set<std::string> sa = signatures(a), sb = signatures(b);
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t common = 0;
  for (const auto& s : sa) common += sb.count(s);
  std::size_t unions = sa.size() + sb.size() - common;
  return static_cast<double>(common) / static_cast<double>(unions);
}

TemplateClass classify_template(const std::string& tmpl) {
  std::size_t slot = tmpl.find("{text}");
  if (slot == std::string::npos) return TemplateClass::Neutral;
  std::string after = tmpl.substr(slot + 6);
  if (after.rfind(" page", 0) == 0) return TemplateClass::Page;
  if (after.rfind(" interface", 0) == 0) return TemplateClass::Interface;
  if (after.rfind(" image", 0) == 0) return TemplateClass::Image;
  return TemplateClass::Neutral;
}

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Suffix word of a page name, if any, mapped to the template class carrying
// the same word.
TemplateClass name_class(const std::string& name) {
  if (ends_with(name, " page")) return TemplateClass::Page;
  if (ends_with(name, " interface")) return TemplateClass::Interface;
  if (ends_with(name, " image")) return TemplateClass::Image;
  return TemplateClass::Neutral;
}

std::string replace_slot(const std::string& tmpl, const std::string& value) {
  std::string out = tmpl;
  std::size_t slot = out.find("{text}");
  if (slot == std::string::npos)
    throw DataError("reach template without {text} slot: " + tmpl);
  out.replace(slot, 6, value);
  return out;
}

std::size_t suffix_len(TemplateClass c) {
  switch (c) {
    case TemplateClass::Page: return 5;        // " page"
    case TemplateClass::Interface: return 10;  // " interface"
    case TemplateClass::Image: return 6;       // " image"
    case TemplateClass::Neutral: return 0;
  }
  return 0;
}

}  // namespace

std::string instantiate_template(const std::string& tmpl,
                                 const std::string& page_name) {
  TemplateClass nc = name_class(page_name);
  TemplateClass tc = classify_template(tmpl);
  if (nc == TemplateClass::Neutral) {
    // Element-derived names are quoted, matching the reference listings.
    return replace_slot(tmpl, "\xe2\x80\x9c" + page_name + "\xe2\x80\x9d");
  }
  if (tc == nc) {
    // "search results page" + "Visit the {text} page." must not double the
    // suffix word; drop it from the name, the template supplies it.
    return replace_slot(tmpl, page_name.substr(0, page_name.size() - suffix_len(nc)));
  }
  return replace_slot(tmpl, page_name);
}

SubtaskExtractor::SubtaskExtractor(const GuiGraph& g, SubtaskExtractorConfig cfg)
    : g_(g), cfg_(std::move(cfg)), rng_(cfg_.seed) {
  if (cfg_.similarity.jaccard_threshold < 0.0 ||
      cfg_.similarity.jaccard_threshold > 1.0)
    throw ConfigError("jaccard_threshold must lie in [0,1]");
  if (cfg_.templates.empty()) cfg_.templates = default_reach_templates();
  for (const auto& name : cfg_.known_names) registry_.preload(name);
}

std::string SubtaskExtractor::pick_task_text(const std::string& page_name) {
  TemplateClass nc = name_class(page_name);
  std::vector<const std::string*> eligible;
  for (const auto& t : cfg_.templates) {
    TemplateClass tc = classify_template(t);
    if (nc == TemplateClass::Neutral || tc == nc || tc == TemplateClass::Neutral)
      eligible.push_back(&t);
  }
  if (eligible.empty())
    throw DataError("no eligible reach template for page name: " + page_name);
  const std::string& tmpl = *eligible[rng_() % eligible.size()];
  return instantiate_template(tmpl, page_name);
}

namespace {

// Page name from a step description's leading locative clause:
// "On the search results page, ..." -> "search results page". Only clauses
// ending in the standalone word "page" or "interface" qualify.
std::string leading_page_phrase(const std::string& desc) {
  static const std::vector<std::string> openers = {"On the ", "In the ",
                                                   "At the ", "on the ",
                                                   "in the ", "at the "};
  for (const auto& opener : openers) {
    if (desc.rfind(opener, 0) != 0) continue;
    std::size_t comma = desc.find(',', opener.size());
    if (comma == std::string::npos) return "";
    std::string clause = desc.substr(opener.size(), comma - opener.size());
    if (ends_with(clause, " page") || ends_with(clause, " interface") ||
        clause == "page" || clause == "interface")
      return clause;
    return "";
  }
  return "";
}

bool mentions_gesture(const std::string& text) {
  static const std::set<std::string> keywords = {
      "scroll", "scrolls", "scrolling", "scrolled", "swipe", "swipes",
      "swiping", "swiped", "input", "inputs", "inputting", "inputted",
      "type", "types", "typing", "typed"};
  std::string word;
  for (char c : text + " ") {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!word.empty()) {
      if (keywords.count(word)) return true;
      word.clear();
    }
  }
  return false;
}

}  // namespace

std::vector<SubtaskSpec> SubtaskExtractor::extract_reaching(const GuiFlow& f) {
  std::vector<SubtaskSpec> out;

  // Rule 1 needs phrase uniqueness across the whole flow: a name used for
  // several distinct pages identifies none of them.
  std::map<std::string, std::set<std::string>> phrase_pages;
  for (std::size_t i = 0; i < f.steps.size(); ++i) {
    if (i >= f.step_descriptions.size()) break;
    std::string phrase = leading_page_phrase(f.step_descriptions[i]);
    if (!phrase.empty()) phrase_pages[phrase].insert(f.steps[i].page_id);
  }

  for (std::size_t i = 0; i < f.steps.size(); ++i) {
    if (i == 0 || i >= f.step_descriptions.size()) continue;
    std::string phrase = leading_page_phrase(f.step_descriptions[i]);
    if (phrase.empty()) continue;
    if (phrase_pages[phrase].size() != 1) continue;
    if (registry_.has_name(phrase)) continue;
    const std::string& target = f.steps[i].page_id;
    registry_.assign(phrase, target);
    SubtaskSpec s;
    s.kind = SubtaskKind::Reach;
    s.target_page = target;
    s.task_text = pick_task_text(phrase);
    s.flow = flow_prefix(f, i);
    s.flow.task = s.task_text;
    out.push_back(std::move(s));
  }

  // Rule 2: clicks on elements the corpus has not seen name their target.
  for (std::size_t i = 0; i < f.steps.size(); ++i) {
    const Action& a = f.steps[i].action;
    if (a.kind != ActionKind::Click || a.element_name.empty()) continue;
    if (registry_.has_name(a.element_name)) continue;
    std::string target = i + 1 < f.steps.size() ? f.steps[i + 1].page_id
                                                : f.terminal_page;
    registry_.assign(a.element_name, target);
    SubtaskSpec s;
    s.kind = SubtaskKind::Reach;
    s.target_page = target;
    s.task_text = pick_task_text(a.element_name);
    s.flow = flow_prefix(f, i + 1);
    s.flow.task = s.task_text;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<SubtaskSpec> SubtaskExtractor::extract_operation(const GuiFlow& f) {
  std::vector<SubtaskSpec> out;
  std::set<std::size_t> emitted;

  auto step_text = [&](std::size_t i) {
    return i < f.step_descriptions.size() && !f.step_descriptions[i].empty()
               ? f.step_descriptions[i]
               : describe_step(g_, f.steps[i]);
  };
  auto emit = [&](std::size_t i) {
    SubtaskSpec s;
    s.kind = SubtaskKind::Operate;
    s.target_page = f.steps[i].page_id;
    s.required_action = f.steps[i].action;
    s.task_text = step_text(i);
    s.flow = flow_prefix(f, i + 1);
    s.flow.task = s.task_text;
    emitted.insert(i);
    out.push_back(std::move(s));
  };

  // Rule 1: gesture steps whose description actually talks about the
  // gesture. Keeps quiet on annotations that frame an input as something
  // else entirely.
  for (std::size_t i = 0; i < f.steps.size(); ++i) {
    ActionKind k = f.steps[i].action.kind;
    if (k != ActionKind::Scroll && k != ActionKind::Input) continue;
    if (!mentions_gesture(step_text(i))) continue;
    emit(i);
  }

  // Rule 2: the page barely changed, so the step is an in-place operation.
  for (std::size_t i = 0; i < f.steps.size(); ++i) {
    if (emitted.count(i)) continue;
    const std::string& before = f.steps[i].page_id;
    const std::string& after =
        i + 1 < f.steps.size() ? f.steps[i + 1].page_id : f.terminal_page;
    if (!g_.has_page(before) || !g_.has_page(after)) continue;
    if (page_similarity(g_.page(before), g_.page(after)) >=
        cfg_.similarity.jaccard_threshold)
      emit(i);
  }

  // Keep emission order by step for rule-2 additions.
  std::stable_sort(out.begin(), out.end(),
                   [&f](const SubtaskSpec& a, const SubtaskSpec& b) {
                     return a.flow.steps.size() < b.flow.steps.size();
                   });
  return out;
}

std::vector<SubtaskSpec> SubtaskExtractor::extract_all(const GuiFlow& f) {
  std::vector<SubtaskSpec> out = extract_reaching(f);
  std::vector<SubtaskSpec> ops = extract_operation(f);
  out.insert(out.end(), std::make_move_iterator(ops.begin()),
             std::make_move_iterator(ops.end()));
  return out;
}

}  // namespace guiflow
