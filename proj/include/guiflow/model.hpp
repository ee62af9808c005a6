#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "guiflow/geometry.hpp"

namespace guiflow {

enum class ActionKind { Click, Scroll, Input, Complete };

// Direction the content moves under the finger (a "left" scroll swipes the
// finger from center toward the left).
enum class ScrollDirection { Up, Down, Left, Right };

std::string to_string(ActionKind k);
std::string to_string(ScrollDirection d);
ActionKind action_kind_from_string(const std::string& s);
ScrollDirection scroll_direction_from_string(const std::string& s);

// One abstract GUI action. Click/Scroll/Input target an element by name and
// bounds; Complete carries only an optional answer text and a zero box.
struct Action {
  ActionKind kind = ActionKind::Complete;
  std::string element_name;
  BoundingBox bounds;
  std::optional<ScrollDirection> direction;  // Scroll only
  std::optional<std::string> input_text;     // Input only
  std::optional<std::string> complete_text;  // Complete only

  static Action click(std::string name, BoundingBox b);
  static Action scroll(std::string name, BoundingBox b, ScrollDirection d);
  static Action input(std::string name, BoundingBox b, std::string text);
  static Action complete(std::string text = "");

  friend bool operator==(const Action&, const Action&) = default;
};

// True when the two actions address the same screen target, ignoring the
// free-text slots: Input compares everything but the typed text, Complete
// compares kind only.
bool same_target(const Action& a, const Action& b);

// Stable one-line rendering, usable as a dedup key.
std::string action_signature(const Action& a);

// Interactive element extracted from a page's XML dump.
struct Element {
  std::string id;
  std::string name;
  BoundingBox bounds;
  bool clickable = false;
  bool scrollable = false;
  bool inputtable = false;
};

struct GuiPage {
  std::string page_id;
  std::string xml;
  std::optional<std::string> screenshot_ref;
  ScreenSize screen;
  std::vector<Element> elements;
  std::optional<std::string> caption;
};

struct GraphEdge {
  std::string src;
  Action action;
  std::string dst;
};

// Directed multigraph over GUI pages. Parallel edges are allowed as long as
// their actions differ; endpoints must be registered pages.
class GuiGraph {
 public:
  void add_page(GuiPage page);
  void add_edge(GraphEdge edge);

  bool has_page(const std::string& page_id) const;
  const GuiPage& page(const std::string& page_id) const;

  const std::map<std::string, GuiPage>& pages() const { return pages_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }

  // Indices into edges() of the edges leaving `src` (possibly empty).
  const std::vector<std::size_t>& outgoing(const std::string& src) const;

  const std::string& home() const { return home_; }
  void set_home(std::string page_id);

 private:
  std::map<std::string, GuiPage> pages_;
  std::vector<GraphEdge> edges_;
  std::map<std::string, std::vector<std::size_t>> out_index_;
  std::string home_;
};

struct FlowStep {
  std::string page_id;
  Action action;
};

// A GUI flow: the chain P0 -a0-> P1 -a1-> ... -> terminal. steps[i] holds the
// page the i-th action is taken on; the page reached by the last action is
// terminal_page. step_descriptions, when present, pairs 1:1 with steps.
struct GuiFlow {
  std::string task;
  std::vector<FlowStep> steps;
  std::vector<std::string> step_descriptions;
  std::string terminal_page;
};

// Page chain P0..Pn (steps().size()+1 entries).
std::vector<std::string> flow_pages(const GuiFlow& flow);

// First `num_steps` actions of `flow` as a flow of its own; the truncation
// point becomes the terminal page. Descriptions are truncated to match.
GuiFlow flow_prefix(const GuiFlow& flow, std::size_t num_steps);

// Dedup keys.
std::string path_signature(const GuiFlow& flow);
std::string flow_actions_signature(const GuiFlow& flow);

enum class SubtaskKind { Reach, Operate };

std::string to_string(SubtaskKind k);
SubtaskKind subtask_kind_from_string(const std::string& s);

// A subtask carved out of a longer flow: reach a page, or reach it and
// perform one specific action there.
struct SubtaskSpec {
  SubtaskKind kind = SubtaskKind::Reach;
  std::string target_page;
  std::optional<Action> required_action;  // Operate only
  std::string task_text;
  GuiFlow flow;
};

}  // namespace guiflow
