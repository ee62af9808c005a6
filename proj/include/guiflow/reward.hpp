#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "guiflow/io.hpp"
#include "guiflow/model.hpp"

namespace guiflow {

// Numeric ranks encode the required ordering; DPO consumes only the order.
enum class RewardLevel { Invalid = 0, Incomplete = 1, Longer = 2, Golden = 3 };

std::string to_string(RewardLevel level);
RewardLevel reward_level_from_string(const std::string& s);

// Ordered Reach/Operate obligations making "completes the instruction"
// decidable on a graph. max_search_depth = 0 means automatic: the larger of
// the golden length and min(2 * golden length, 15).
struct CompletionSpec {
  std::vector<SubtaskSpec> obligations;
  int max_search_depth = 0;
};

// The weakest spec a flow certifies: reach its terminal page.
CompletionSpec spec_from_flow(const GuiFlow& f);

// Obligations for one extracted subtask.
CompletionSpec completion_spec_for(const SubtaskSpec& s);

// Precomputes shortest completion distances over (page, progress) product
// states for one (graph, spec); classification queries are then O(edges of
// one page).
class RewardScorer {
 public:
  // Throws ConfigError on an empty spec, DataError on unknown target pages.
  RewardScorer(const GuiGraph& g, CompletionSpec spec);

  const CompletionSpec& spec() const { return spec_; }
  int obligation_count() const { return m_; }

  // Obligations satisfied after replaying `history` from its first page.
  // An empty flow means "standing at start, nothing executed".
  int progress_after(const GuiFlow& history) const;

  // Progress when standing at `start` before acting (leading Reach
  // obligations absorb immediately).
  int initial_progress(const std::string& start) const;

  // Progress after one executed transition src -a-> dst: the action event
  // can discharge an Operate obligation, arrival absorbs Reach obligations.
  int advance(int k, const std::string& src_page, const Action& executed,
              const std::string& dst_page) const;

  // Length in actions, Complete included, of the shortest completing flow
  // from `start`; nullopt if none exists within the search depth.
  std::optional<int> golden_length(const std::string& start) const;

  // 4-level classification of taking `a` at `page_id` after `history`.
  // Throws NoGoldenFlowError when the spec is unsatisfiable from the
  // history's start page.
  RewardLevel classify(const std::string& page_id, const GuiFlow& history,
                       const Action& a) const;

 private:
  int absorb(int page, int k) const;
  int operate_check(int k, int page, const Action& executed) const;
  int state_of(int page, int k) const { return page * (m_ + 1) + k; }
  int page_index(const std::string& page_id) const;
  int effective_depth(int golden) const;

  const GuiGraph& g_;
  CompletionSpec spec_;
  int m_ = 0;
  std::vector<std::string> pages_;
  std::map<std::string, int> page_index_;
  std::vector<int> obligation_page_;  // target page index per obligation
  std::vector<int> rest_;             // product state -> min transitions to done
};

// One-shot conveniences over RewardScorer.
std::optional<int> golden_length(const GuiGraph& g, const std::string& start,
                                 const CompletionSpec& spec);
RewardLevel classify_action(const GuiGraph& g, const std::string& page_id,
                            const GuiFlow& history, const Action& a,
                            const CompletionSpec& spec);

enum class PairSource { AgentGenerated, SpaceSampled };

std::string to_string(PairSource s);
PairSource pair_source_from_string(const std::string& s);

struct PreferencePair {
  std::string task;
  std::string page_id;
  Action chosen;
  Action rejected;
  RewardLevel chosen_level = RewardLevel::Golden;
  RewardLevel rejected_level = RewardLevel::Invalid;
  PairSource source = PairSource::SpaceSampled;
  int golden_length = 0;  // provenance: L* of the pair's task from flow start
};

// A flow replayed by an agent: the agent's action at each step, when it
// produced one.
struct RegeneratedFlow {
  GuiFlow golden;
  std::vector<std::optional<Action>> agent_actions;
};

// For each step of each flow: pair the flow's action against the agent's
// when the agent scored strictly lower, otherwise against a seeded uniform
// draw from the strictly-lower part of the page's action space; steps with
// no strictly-lower candidate are skipped.
std::vector<PreferencePair> build_preference_pairs(
    const GuiGraph& g, const std::vector<RegeneratedFlow>& flows,
    const std::function<CompletionSpec(const GuiFlow&)>& spec_fn,
    std::uint64_t seed);

json pair_to_json(const PreferencePair& p);
PreferencePair pair_from_json(const json& j);

}  // namespace guiflow
