#include "guiflow/episode.hpp"

#include "guiflow/action_space.hpp"
#include "guiflow/errors.hpp"
#include "guiflow/io.hpp"

namespace guiflow {

std::string to_string(StepOutcome o) {
  return o == StepOutcome::Executed ? "Executed" : "InvalidStay";
}

std::string to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::Complete: return "Complete";
    case TerminationReason::StepLimit: return "StepLimit";
    case TerminationReason::StrictFailure: return "StrictFailure";
  }
  throw Error("unreachable termination reason");
}

StepOutcome step_outcome_from_string(const std::string& s) {
  if (s == "Executed") return StepOutcome::Executed;
  if (s == "InvalidStay") return StepOutcome::InvalidStay;
  throw DataError("unknown step outcome: " + s);
}

TerminationReason termination_reason_from_string(const std::string& s) {
  if (s == "Complete") return TerminationReason::Complete;
  if (s == "StepLimit") return TerminationReason::StepLimit;
  if (s == "StrictFailure") return TerminationReason::StrictFailure;
  throw DataError("unknown termination reason: " + s);
}

json trace_to_json(const EpisodeTrace& t) {
  json steps = json::array();
  for (const VisitedStep& v : t.visited) {
    json rec;
    rec["page"] = v.page_id;
    rec["action"] = action_to_json(v.action);
    rec["outcome"] = to_string(v.outcome);
    steps.push_back(std::move(rec));
  }
  json j;
  j["task"] = t.task;
  j["visited"] = std::move(steps);
  j["terminated_by"] = to_string(t.terminated_by);
  return j;
}

EpisodeTrace trace_from_json(const json& j) {
  if (!j.is_object()) throw DataError("trace record is not an object");
  EpisodeTrace t;
  t.task = j.at("task").get<std::string>();
  for (const json& rec : j.at("visited")) {
    VisitedStep v;
    v.page_id = rec.at("page").get<std::string>();
    v.action = action_from_json(rec.at("action"));
    v.outcome = step_outcome_from_string(rec.at("outcome").get<std::string>());
    t.visited.push_back(std::move(v));
  }
  t.terminated_by =
      termination_reason_from_string(j.at("terminated_by").get<std::string>());
  return t;
}

const GraphEdge* match_edge(const GuiGraph& g, const std::string& page_id,
                            const Action& a) {
  if (a.kind == ActionKind::Complete) return nullptr;
  for (std::size_t idx : g.outgoing(page_id)) {
    const GraphEdge& e = g.edges()[idx];
    if (!same_target(e.action, a)) continue;
    if (a.kind == ActionKind::Input &&
        trim(e.action.input_text.value_or("")) !=
            trim(a.input_text.value_or(""))) {
      continue;
    }
    return &e;
  }
  return nullptr;
}

Environment::Environment(const GuiGraph& g, std::string task,
                         const std::string& start, EpisodeConfig cfg)
    : g_(g), cfg_(cfg) {
  if (cfg_.max_steps < 1) throw ConfigError("max_steps must be >= 1");
  current_ = start.empty() ? g_.home() : start;
  if (!g_.has_page(current_)) {
    throw UnknownPageError("episode start page not in graph: " + current_);
  }
  trace_.task = std::move(task);
}

const GuiPage& Environment::current_page() const {
  return g_.page(current_);
}

std::vector<Action> Environment::attempted_actions() const {
  std::vector<Action> out;
  out.reserve(trace_.visited.size());
  for (const VisitedStep& v : trace_.visited) out.push_back(v.action);
  return out;
}

StepOutcome Environment::step(const Action& a) {
  if (terminated_) {
    throw EpisodeTerminatedError("episode already terminated");
  }
  VisitedStep v{current_, a, StepOutcome::Executed};

  if (a.kind == ActionKind::Complete) {
    trace_.visited.push_back(std::move(v));
    trace_.terminated_by = TerminationReason::Complete;
    terminated_ = true;
    return StepOutcome::Executed;
  }

  const GraphEdge* e = match_edge(g_, current_, a);
  if (e != nullptr) {
    trace_.visited.push_back(std::move(v));
    current_ = e->dst;
  } else {
    v.outcome = StepOutcome::InvalidStay;
    trace_.visited.push_back(std::move(v));
    if (cfg_.invalid_action_policy == InvalidActionPolicy::Strict) {
      trace_.terminated_by = TerminationReason::StrictFailure;
      terminated_ = true;
      return StepOutcome::InvalidStay;
    }
  }

  if (static_cast<int>(trace_.visited.size()) >= cfg_.max_steps) {
    trace_.terminated_by = TerminationReason::StepLimit;
    terminated_ = true;
  }
  return trace_.visited.back().outcome;
}

Action GoldenReplayAgent::decide(const std::string& task, const GuiPage& page,
                                 const std::vector<Action>& action_space,
                                 const std::vector<Action>& history) {
  const std::size_t i = history.size();
  if (i < flow_.steps.size()) return flow_.steps[i].action;
  return Action::complete();
}

Action RandomAgent::decide(const std::string& task, const GuiPage& page,
                           const std::vector<Action>& action_space,
                           const std::vector<Action>& history) {
  if (action_space.empty()) throw DataError("empty action space");
  return action_space[rng_() % action_space.size()];
}

Action PolicyAgent::decide(const std::string& task, const GuiPage& page,
                           const std::vector<Action>& action_space,
                           const std::vector<Action>& history) {
  const std::vector<ScoredAction> scored =
      action_logprobs(policy_, task, page, history);
  if (scored.empty()) throw DataError("empty action space");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scored.size(); ++i) {
    if (scored[i].logprob > scored[best].logprob) best = i;
  }
  return scored[best].action;
}

EpisodeTrace run_episode(const GuiGraph& g, Agent& agent,
                         const std::string& task, EpisodeConfig cfg,
                         const std::string& start) {
  Environment env(g, task, start, cfg);
  while (!env.terminated()) {
    const GuiPage& page = env.current_page();
    const Action a = agent.decide(task, page, enumerate_action_space(page),
                                  env.attempted_actions());
    env.step(a);
  }
  return env.trace();
}

}  // namespace guiflow
