#include "guiflow/model.hpp"

#include <utility>

#include "guiflow/errors.hpp"

namespace guiflow {

std::string to_string(ActionKind k) {
  switch (k) {
    case ActionKind::Click: return "click";
    case ActionKind::Scroll: return "scroll";
    case ActionKind::Input: return "input";
    case ActionKind::Complete: return "complete";
  }
  throw Error("unreachable action kind");
}

std::string to_string(ScrollDirection d) {
  switch (d) {
    case ScrollDirection::Up: return "up";
    case ScrollDirection::Down: return "down";
    case ScrollDirection::Left: return "left";
    case ScrollDirection::Right: return "right";
  }
  throw Error("unreachable scroll direction");
}

ActionKind action_kind_from_string(const std::string& s) {
  if (s == "click") return ActionKind::Click;
  if (s == "scroll") return ActionKind::Scroll;
  if (s == "input") return ActionKind::Input;
  if (s == "complete") return ActionKind::Complete;
  throw DataError("unknown action kind: " + s);
}

ScrollDirection scroll_direction_from_string(const std::string& s) {
  if (s == "up") return ScrollDirection::Up;
  if (s == "down") return ScrollDirection::Down;
  if (s == "left") return ScrollDirection::Left;
  if (s == "right") return ScrollDirection::Right;
  throw DataError("unknown scroll direction: " + s);
}

Action Action::click(std::string name, BoundingBox b) {
  Action a;
  a.kind = ActionKind::Click;
  a.element_name = std::move(name);
  a.bounds = b;
  return a;
}

Action Action::scroll(std::string name, BoundingBox b, ScrollDirection d) {
  Action a;
  a.kind = ActionKind::Scroll;
  a.element_name = std::move(name);
  a.bounds = b;
  a.direction = d;
  return a;
}

Action Action::input(std::string name, BoundingBox b, std::string text) {
  Action a;
  a.kind = ActionKind::Input;
  a.element_name = std::move(name);
  a.bounds = b;
  a.input_text = std::move(text);
  return a;
}

Action Action::complete(std::string text) {
  Action a;
  a.kind = ActionKind::Complete;
  a.complete_text = std::move(text);
  return a;
}

bool same_target(const Action& a, const Action& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == ActionKind::Complete) return true;
  if (a.element_name != b.element_name || a.bounds != b.bounds) return false;
  if (a.kind == ActionKind::Scroll) return a.direction == b.direction;
  // Click needs nothing more; Input deliberately ignores the typed text.
  return true;
}

std::string action_signature(const Action& a) {
  std::string s = to_string(a.kind);
  switch (a.kind) {
    case ActionKind::Complete:
      if (a.complete_text && !a.complete_text->empty()) s += "(" + *a.complete_text + ")";
      return s;
    case ActionKind::Scroll:
      s += "(" + a.element_name + "," + bbox_to_string(a.bounds) + "," +
           to_string(*a.direction) + ")";
      return s;
    case ActionKind::Input:
      s += "(" + a.element_name + "," + bbox_to_string(a.bounds) + "," +
           (a.input_text ? *a.input_text : "") + ")";
      return s;
    case ActionKind::Click:
      s += "(" + a.element_name + "," + bbox_to_string(a.bounds) + ")";
      return s;
  }
  throw Error("unreachable action kind");
}

void GuiGraph::add_page(GuiPage page) {
  if (page.page_id.empty()) throw DataError("page with empty id");
  auto [it, inserted] = pages_.emplace(page.page_id, std::move(page));
  if (!inserted) throw DataError("duplicate page id: " + it->first);
}

void GuiGraph::add_edge(GraphEdge edge) {
  if (!has_page(edge.src)) throw UnknownPageError("edge source not in graph: " + edge.src);
  if (!has_page(edge.dst)) throw UnknownPageError("edge target not in graph: " + edge.dst);
  if (edge.action.kind == ActionKind::Complete)
    throw DataError("complete is not a transition action");
  out_index_[edge.src].push_back(edges_.size());
  edges_.push_back(std::move(edge));
}

bool GuiGraph::has_page(const std::string& page_id) const {
  return pages_.count(page_id) != 0;
}

const GuiPage& GuiGraph::page(const std::string& page_id) const {
  auto it = pages_.find(page_id);
  if (it == pages_.end()) throw UnknownPageError("unknown page: " + page_id);
  return it->second;
}

const std::vector<std::size_t>& GuiGraph::outgoing(const std::string& src) const {
  static const std::vector<std::size_t> kEmpty;
  auto it = out_index_.find(src);
  return it == out_index_.end() ? kEmpty : it->second;
}

void GuiGraph::set_home(std::string page_id) {
  if (!has_page(page_id)) throw UnknownPageError("home page not in graph: " + page_id);
  home_ = std::move(page_id);
}

std::vector<std::string> flow_pages(const GuiFlow& flow) {
  std::vector<std::string> pages;
  pages.reserve(flow.steps.size() + 1);
  for (const auto& step : flow.steps) pages.push_back(step.page_id);
  pages.push_back(flow.terminal_page);
  return pages;
}

GuiFlow flow_prefix(const GuiFlow& flow, std::size_t num_steps) {
  if (num_steps > flow.steps.size())
    throw DataError("flow prefix longer than flow");
  GuiFlow out;
  out.task = flow.task;
  out.steps.assign(flow.steps.begin(), flow.steps.begin() + num_steps);
  if (!flow.step_descriptions.empty()) {
    std::size_t n = std::min(num_steps, flow.step_descriptions.size());
    out.step_descriptions.assign(flow.step_descriptions.begin(),
                                 flow.step_descriptions.begin() + n);
  }
  out.terminal_page = num_steps == flow.steps.size()
                          ? flow.terminal_page
                          : flow.steps[num_steps].page_id;
  return out;
}

std::string path_signature(const GuiFlow& flow) {
  std::string s;
  for (const auto& page : flow_pages(flow)) {
    s += page;
    s += '>';
  }
  return s;
}

std::string flow_actions_signature(const GuiFlow& flow) {
  std::string s;
  for (const auto& step : flow.steps) {
    s += step.page_id;
    s += ':';
    s += action_signature(step.action);
    s += '|';
  }
  return s;
}

std::string to_string(SubtaskKind k) {
  return k == SubtaskKind::Reach ? "reach" : "operate";
}

SubtaskKind subtask_kind_from_string(const std::string& s) {
  if (s == "reach") return SubtaskKind::Reach;
  if (s == "operate") return SubtaskKind::Operate;
  throw DataError("unknown subtask kind: " + s);
}

}  // namespace guiflow
