#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "guiflow/model.hpp"
#include "guiflow/sampler.hpp"

namespace guiflow {

struct SimilarityConfig {
  double jaccard_threshold = 0.8;
};

// Jaccard index over element signatures (id, name, bounds). Two pages with
// no elements at all count as identical (1.0).
double page_similarity(const GuiPage& a, const GuiPage& b);

// Built-in page-reaching task templates, each containing a "{text}" slot.
const std::vector<std::string>& default_reach_templates();

// How a template frames its {text} slot, inferred from the words following
// the placeholder.
enum class TemplateClass { Page, Interface, Image, Neutral };
TemplateClass classify_template(const std::string& tmpl);

// Fill {text}. Page names carrying a page/interface/image suffix drop it
// when the template supplies the same suffix word, so the rendered task still
// contains the full name verbatim; bare names are quoted.
std::string instantiate_template(const std::string& tmpl,
                                 const std::string& page_name);

struct SubtaskExtractorConfig {
  std::uint64_t seed = 0;
  SimilarityConfig similarity;
  std::vector<std::string> templates;    // empty -> default_reach_templates()
  std::vector<std::string> known_names;  // names treated as already assigned
};

// Splits annotated flows into page-reaching and page-operation subtasks.
// Holds the page-name registry across flows, so names already carved out
// (or preloaded from an existing corpus) are not re-extracted.
class SubtaskExtractor {
 public:
  SubtaskExtractor(const GuiGraph& g, SubtaskExtractorConfig cfg);

  // Rule 1: a step description opens with a locative naming its page
  // uniquely ("On the {name} page/interface, ..."). Rule 2: a Click on an
  // element whose name is unregistered names the page it leads to. Both emit
  // the prefix flow reaching the named page with a template task.
  std::vector<SubtaskSpec> extract_reaching(const GuiFlow& f);

  // Rule 1: Scroll/Input steps whose description speaks of the gesture.
  // Rule 2: steps whose surrounding pages are near-identical. Both emit the
  // prefix flow through the step's action, task text = the description.
  std::vector<SubtaskSpec> extract_operation(const GuiFlow& f);

  // Reaching then operation subtasks of one flow.
  std::vector<SubtaskSpec> extract_all(const GuiFlow& f);

  PageNameRegistry& registry() { return registry_; }

 private:
  std::string pick_task_text(const std::string& page_name);

  const GuiGraph& g_;
  SubtaskExtractorConfig cfg_;
  std::mt19937_64 rng_;
  PageNameRegistry registry_;
};

}  // namespace guiflow
