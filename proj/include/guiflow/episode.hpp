#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "guiflow/model.hpp"
#include "guiflow/policy.hpp"

namespace guiflow {

// Lenient keeps scoring flawed agents: an unmatched action burns a step and
// leaves the page unchanged. Strict aborts the episode instead.
enum class InvalidActionPolicy { Strict, Lenient };

struct EpisodeConfig {
  int max_steps = 15;
  InvalidActionPolicy invalid_action_policy = InvalidActionPolicy::Lenient;
};

enum class StepOutcome { Executed, InvalidStay };
enum class TerminationReason { Complete, StepLimit, StrictFailure };

std::string to_string(StepOutcome o);
std::string to_string(TerminationReason r);
StepOutcome step_outcome_from_string(const std::string& s);
TerminationReason termination_reason_from_string(const std::string& s);

struct VisitedStep {
  std::string page_id;  // page the action was attempted on
  Action action;
  StepOutcome outcome = StepOutcome::Executed;
};

struct EpisodeTrace {
  std::string task;
  std::vector<VisitedStep> visited;
  TerminationReason terminated_by = TerminationReason::StepLimit;
};

json trace_to_json(const EpisodeTrace& t);
EpisodeTrace trace_from_json(const json& j);

// First outgoing edge the environment would execute for `a` at `page_id`:
// target identity must match, and Input additionally needs the same typed
// text after trimming. nullptr when nothing matches.
const GraphEdge* match_edge(const GuiGraph& g, const std::string& page_id,
                            const Action& a);

// One in-flight episode. Construction is the reset operation.
class Environment {
 public:
  // Throws UnknownPageError when start is not in g; empty start means home.
  Environment(const GuiGraph& g, std::string task, const std::string& start,
              EpisodeConfig cfg = {});

  const std::string& current_page_id() const { return current_; }
  const GuiPage& current_page() const;
  bool terminated() const { return terminated_; }
  const EpisodeTrace& trace() const { return trace_; }

  // All attempted actions so far, in order (the history fed to agents).
  std::vector<Action> attempted_actions() const;

  // Throws EpisodeTerminatedError once the episode is over.
  StepOutcome step(const Action& a);

 private:
  const GuiGraph& g_;
  EpisodeConfig cfg_;
  std::string current_;
  bool terminated_ = false;
  EpisodeTrace trace_;
};

// Anything that can pick the next action. decide() sees the full action
// space of the current page and every action attempted so far.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual Action decide(const std::string& task, const GuiPage& page,
                        const std::vector<Action>& action_space,
                        const std::vector<Action>& history) = 0;
};

// Replays a fixed flow action by action, then issues Complete. Stateless
// across calls: the position is the history length.
class GoldenReplayAgent : public Agent {
 public:
  explicit GoldenReplayAgent(GuiFlow flow) : flow_(std::move(flow)) {}
  Action decide(const std::string& task, const GuiPage& page,
                const std::vector<Action>& action_space,
                const std::vector<Action>& history) override;

 private:
  GuiFlow flow_;
};

// Uniform choice over the current action space. The generator state evolves
// across calls, so one seeded agent gives one reproducible run.
class RandomAgent : public Agent {
 public:
  explicit RandomAgent(std::uint64_t seed) : rng_(seed) {}
  Action decide(const std::string& task, const GuiPage& page,
                const std::vector<Action>& action_space,
                const std::vector<Action>& history) override;

 private:
  std::mt19937_64 rng_;
};

// Greedy argmax over a linear policy's action log-probabilities; ties go to
// the earlier action in enumeration order.
class PolicyAgent : public Agent {
 public:
  explicit PolicyAgent(LinearPolicy policy) : policy_(std::move(policy)) {}
  Action decide(const std::string& task, const GuiPage& page,
                const std::vector<Action>& action_space,
                const std::vector<Action>& history) override;

 private:
  LinearPolicy policy_;
};

EpisodeTrace run_episode(const GuiGraph& g, Agent& agent,
                         const std::string& task, EpisodeConfig cfg = {},
                         const std::string& start = "");

}  // namespace guiflow
