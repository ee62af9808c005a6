#include "guiflow/metrics.hpp"

#include <cctype>
#include <map>
#include <sstream>

#include "guiflow/errors.hpp"
#include "guiflow/io.hpp"

namespace guiflow {

namespace {

std::vector<std::string> lowercase_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) {
        out.push_back(cur);
        cur.clear();
      }
    } else {
      cur.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

std::string to_string(IouMode m) {
  return m == IouMode::ExpandIntersect ? "ExpandIntersect" : "CenterIn";
}

IouMode iou_mode_from_string(const std::string& s) {
  if (s == "ExpandIntersect") return IouMode::ExpandIntersect;
  if (s == "CenterIn") return IouMode::CenterIn;
  throw ConfigError("unknown iou mode: " + s);
}

bool judge_iou(const Action& pred, const Action& gold, ScreenSize screen,
               const JudgeConfig& cfg) {
  if (pred.kind != gold.kind) return false;
  if (gold.kind == ActionKind::Complete) return true;
  const BoundingBox expanded = bbox_expand(gold.bounds, screen, cfg.margin);
  if (cfg.iou_mode == IouMode::ExpandIntersect) {
    return bbox_intersects(pred.bounds, expanded);
  }
  const Point c = bbox_center(pred.bounds);
  return c.x >= expanded.x1 && c.x <= expanded.x2 && c.y >= expanded.y1 &&
         c.y <= expanded.y2;
}

double token_f1(const std::string& pred, const std::string& gold) {
  const std::vector<std::string> p = lowercase_tokens(pred);
  const std::vector<std::string> g = lowercase_tokens(gold);
  if (p.empty() && g.empty()) return 1.0;
  if (p.empty() || g.empty()) return 0.0;
  std::map<std::string, long long> counts;
  for (const std::string& t : g) ++counts[t];
  long long inter = 0;
  for (const std::string& t : p) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++inter;
    }
  }
  // 2PR/(P+R) algebraically reduced; keeps 0.8-style values exact.
  return 2.0 * static_cast<double>(inter) /
         static_cast<double>(p.size() + g.size());
}

bool judge_text(const Action& pred, const Action& gold) {
  if (pred.kind != gold.kind) return false;
  switch (gold.kind) {
    case ActionKind::Click:
      return pred.element_name == gold.element_name;
    case ActionKind::Scroll:
      return pred.element_name == gold.element_name &&
             pred.direction == gold.direction;
    case ActionKind::Input:
      return pred.element_name == gold.element_name &&
             token_f1(pred.input_text.value_or(""),
                      gold.input_text.value_or("")) > 0.8;
    case ActionKind::Complete:
      return pred.complete_text.value_or("") == gold.complete_text.value_or("");
  }
  throw Error("unreachable action kind");
}

EpisodeTrace flow_as_trace(const GuiFlow& f) {
  EpisodeTrace t;
  t.task = f.task;
  for (const FlowStep& s : f.steps) {
    t.visited.push_back({s.page_id, s.action, StepOutcome::Executed});
  }
  t.visited.push_back(
      {f.terminal_page, Action::complete(), StepOutcome::Executed});
  t.terminated_by = TerminationReason::Complete;
  return t;
}

namespace {

// Graph replay of a predicted trace: does it discharge every obligation in
// order and stop with Complete at the end, within the step cap?
bool replay_success(const EpisodeTrace& pred, const CompletionSpec& spec,
                    const GuiGraph& g, const JudgeConfig& cfg) {
  if (pred.visited.empty()) return false;
  if (static_cast<int>(pred.visited.size()) > cfg.step_cap) return false;
  const std::string& start = pred.visited.front().page_id;
  if (!g.has_page(start)) return false;
  const RewardScorer scorer(g, spec);
  int k = scorer.initial_progress(start);
  std::string cur = start;
  for (std::size_t i = 0; i < pred.visited.size(); ++i) {
    const Action& a = pred.visited[i].action;
    if (a.kind == ActionKind::Complete) {
      return i + 1 == pred.visited.size() && k == scorer.obligation_count();
    }
    // The edge's own action is the canonical executed event.
    if (const GraphEdge* e = match_edge(g, cur, a)) {
      k = scorer.advance(k, cur, e->action, e->dst);
      cur = e->dst;
    }
  }
  return false;  // never issued Complete
}

}  // namespace

FlowScore score_flow(const EpisodeTrace& pred, const GuiFlow& gold,
                     const CompletionSpec& spec, const GuiGraph& g,
                     const JudgeConfig& cfg) {
  // Golden step sequence with the terminating Complete made explicit.
  std::vector<FlowStep> gold_steps = gold.steps;
  gold_steps.push_back({gold.terminal_page, Action::complete()});

  FlowScore score;
  score.steps.resize(gold_steps.size());
  const std::size_t n_pred = pred.visited.size();
  for (std::size_t j = 0; j < gold_steps.size(); ++j) {
    if (j >= n_pred) break;  // missing prediction stays false/false
    const Action& pa = pred.visited[j].action;
    const Action& ga = gold_steps[j].action;
    const ScreenSize screen = g.page(gold_steps[j].page_id).screen;
    score.steps[j].iou_ok = judge_iou(pa, ga, screen, cfg);
    score.steps[j].text_ok = judge_text(pa, ga);
  }
  const bool exact_length = n_pred == gold_steps.size();
  score.task_iou = exact_length;
  score.task_text = exact_length;
  for (const StepJudgment& s : score.steps) {
    score.task_iou = score.task_iou && s.iou_ok;
    score.task_text = score.task_text && s.text_ok;
  }
  score.success = replay_success(pred, spec, g, cfg);
  return score;
}

MetricReport score_run(const std::vector<EpisodeTrace>& preds,
                       const std::vector<GuiFlow>& golds,
                       const std::vector<CompletionSpec>& specs,
                       const GuiGraph& g, const JudgeConfig& cfg) {
  if (specs.size() != golds.size()) {
    throw AlignmentError("spec count does not match gold flow count");
  }
  if (preds.size() > golds.size()) {
    throw AlignmentError("more predictions than gold flows");
  }
  MetricReport r;
  r.margin = cfg.margin;
  r.iou_mode = to_string(cfg.iou_mode);
  r.step_cap = cfg.step_cap;
  r.flows = static_cast<long long>(golds.size());

  static const EpisodeTrace kEmptyTrace{};
  for (std::size_t i = 0; i < golds.size(); ++i) {
    const bool have_pred = i < preds.size();
    if (have_pred && preds[i].task != golds[i].task) {
      throw AlignmentError("task mismatch at flow " + std::to_string(i) +
                           ": '" + preds[i].task + "' vs '" + golds[i].task +
                           "'");
    }
    const EpisodeTrace& pred = have_pred ? preds[i] : kEmptyTrace;
    const FlowScore fs = score_flow(pred, golds[i], specs[i], g, cfg);
    r.gold_steps += static_cast<long long>(fs.steps.size());
    for (const StepJudgment& s : fs.steps) {
      r.iou_ok_steps += s.iou_ok ? 1 : 0;
      r.text_ok_steps += s.text_ok ? 1 : 0;
    }
    r.task_iou_ok += fs.task_iou ? 1 : 0;
    r.task_text_ok += fs.task_text ? 1 : 0;
    r.success_ok += fs.success ? 1 : 0;
  }

  const auto ratio = [](long long num, long long den) {
    return den == 0 ? 0.0
                    : static_cast<double>(num) / static_cast<double>(den);
  };
  r.step_iou_acc = ratio(r.iou_ok_steps, r.gold_steps);
  r.step_text_acc = ratio(r.text_ok_steps, r.gold_steps);
  r.task_iou_acc = ratio(r.task_iou_ok, r.flows);
  r.task_text_acc = ratio(r.task_text_ok, r.flows);
  r.task_success_rate = ratio(r.success_ok, r.flows);
  return r;
}

json report_to_json(const MetricReport& r) {
  json j;
  j["version"] = 1;
  j["flows"] = r.flows;
  j["gold_steps"] = r.gold_steps;
  j["iou_ok_steps"] = r.iou_ok_steps;
  j["text_ok_steps"] = r.text_ok_steps;
  j["task_iou_ok"] = r.task_iou_ok;
  j["task_text_ok"] = r.task_text_ok;
  j["success_ok"] = r.success_ok;
  j["step_iou_acc"] = r.step_iou_acc;
  j["step_text_acc"] = r.step_text_acc;
  j["task_iou_acc"] = r.task_iou_acc;
  j["task_text_acc"] = r.task_text_acc;
  j["task_success_rate"] = r.task_success_rate;
  j["margin"] = r.margin;
  j["iou_mode"] = r.iou_mode;
  j["step_cap"] = r.step_cap;
  return j;
}

MetricReport report_from_json(const json& j) {
  if (!j.is_object() || j.value("version", 0) != 1) {
    throw DataError("unsupported metric report version");
  }
  MetricReport r;
  r.flows = j.at("flows").get<long long>();
  r.gold_steps = j.at("gold_steps").get<long long>();
  r.iou_ok_steps = j.at("iou_ok_steps").get<long long>();
  r.text_ok_steps = j.at("text_ok_steps").get<long long>();
  r.task_iou_ok = j.at("task_iou_ok").get<long long>();
  r.task_text_ok = j.at("task_text_ok").get<long long>();
  r.success_ok = j.at("success_ok").get<long long>();
  r.step_iou_acc = j.at("step_iou_acc").get<double>();
  r.step_text_acc = j.at("step_text_acc").get<double>();
  r.task_iou_acc = j.at("task_iou_acc").get<double>();
  r.task_text_acc = j.at("task_text_acc").get<double>();
  r.task_success_rate = j.at("task_success_rate").get<double>();
  r.margin = j.at("margin").get<double>();
  r.iou_mode = j.at("iou_mode").get<std::string>();
  r.step_cap = j.at("step_cap").get<int>();
  return r;
}

std::string report_table(const MetricReport& r) {
  std::ostringstream out;
  const auto row = [&out](const std::string& name, long long ok,
                          long long total, double value) {
    out << "  " << name;
    for (std::size_t i = name.size(); i < 20; ++i) out << ' ';
    out << ok << "/" << total << " = " << value << "\n";
  };
  out << "metrics (margin=" << r.margin << ", mode=" << r.iou_mode
      << ", step_cap=" << r.step_cap << ")\n";
  row("step_iou_acc", r.iou_ok_steps, r.gold_steps, r.step_iou_acc);
  row("step_text_acc", r.text_ok_steps, r.gold_steps, r.step_text_acc);
  row("task_iou_acc", r.task_iou_ok, r.flows, r.task_iou_acc);
  row("task_text_acc", r.task_text_ok, r.flows, r.task_text_acc);
  row("task_success_rate", r.success_ok, r.flows, r.task_success_rate);
  return out.str();
}

}  // namespace guiflow
