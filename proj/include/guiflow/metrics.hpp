#pragma once

#include <string>
#include <vector>

#include "guiflow/episode.hpp"
#include "guiflow/geometry.hpp"
#include "guiflow/model.hpp"
#include "guiflow/reward.hpp"

namespace guiflow {

enum class IouMode { ExpandIntersect, CenterIn };

std::string to_string(IouMode m);
IouMode iou_mode_from_string(const std::string& s);

struct JudgeConfig {
  double margin = 0.14;  // golden-box expansion, fraction of screen size
  IouMode iou_mode = IouMode::ExpandIntersect;
  int step_cap = 15;  // task success must finish within this many steps
};

// Box agreement: the golden box is expanded by margin x screen per axis,
// then either intersection (default) or center containment is required.
// Kind mismatch is false; Complete vs Complete is true.
bool judge_iou(const Action& pred, const Action& gold, ScreenSize screen,
               const JudgeConfig& cfg = {});

// Multiset token F1 over lowercase whitespace tokens. Both empty -> 1,
// exactly one empty -> 0.
double token_f1(const std::string& pred, const std::string& gold);

// Textual agreement per action kind: names and directions must be exact;
// Input text needs F1 strictly above 0.8; Complete text must be exact.
bool judge_text(const Action& pred, const Action& gold);

struct StepJudgment {
  bool iou_ok = false;
  bool text_ok = false;
};

struct FlowScore {
  std::vector<StepJudgment> steps;  // one per gold step, Complete included
  bool task_iou = false;
  bool task_text = false;
  bool success = false;
};

// Positional judgments of a predicted trace against one golden flow, plus
// graph replay for task success.
FlowScore score_flow(const EpisodeTrace& pred, const GuiFlow& gold,
                     const CompletionSpec& spec, const GuiGraph& g,
                     const JudgeConfig& cfg = {});

struct MetricReport {
  long long gold_steps = 0;
  long long iou_ok_steps = 0;
  long long text_ok_steps = 0;
  long long flows = 0;
  long long task_iou_ok = 0;
  long long task_text_ok = 0;
  long long success_ok = 0;
  // Exact count ratios; 0 when the denominator is 0.
  double step_iou_acc = 0.0;
  double step_text_acc = 0.0;
  double task_iou_acc = 0.0;
  double task_text_acc = 0.0;
  double task_success_rate = 0.0;
  // Echo of the judgment configuration for auditability.
  double margin = 0.14;
  std::string iou_mode = "ExpandIntersect";
  int step_cap = 15;
};

// Aggregates score_flow over aligned prediction/gold/spec triples. Throws
// AlignmentError when lengths or task strings disagree.
MetricReport score_run(const std::vector<EpisodeTrace>& preds,
                       const std::vector<GuiFlow>& golds,
                       const std::vector<CompletionSpec>& specs,
                       const GuiGraph& g, const JudgeConfig& cfg = {});

// A flow reinterpreted as its own perfect trace (Complete appended), for
// flow-vs-flow scoring.
EpisodeTrace flow_as_trace(const GuiFlow& f);

json report_to_json(const MetricReport& r);
MetricReport report_from_json(const json& j);
std::string report_table(const MetricReport& r);

}  // namespace guiflow
