#include "guiflow/reward.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <random>

#include "guiflow/action_space.hpp"
#include "guiflow/errors.hpp"

namespace guiflow {

namespace {

constexpr int kInf = std::numeric_limits<int>::max();

// Hard ceiling matching the episode step limit; the automatic search depth
// never exceeds it unless the golden flow itself is longer.
constexpr int kDepthCeiling = 15;

// Does `executed` discharge an Operate obligation demanding `required`?
// Input obligations insist on the exact typed text, everything else is
// target identity.
bool operate_matches(const Action& required, const Action& executed) {
  if (!same_target(required, executed)) return false;
  if (required.kind == ActionKind::Input) {
    return required.input_text.value_or("") == executed.input_text.value_or("");
  }
  return true;
}

}  // namespace

std::string to_string(RewardLevel level) {
  switch (level) {
    case RewardLevel::Invalid: return "Invalid";
    case RewardLevel::Incomplete: return "Incomplete";
    case RewardLevel::Longer: return "Longer";
    case RewardLevel::Golden: return "Golden";
  }
  throw Error("unreachable reward level");
}

RewardLevel reward_level_from_string(const std::string& s) {
  if (s == "Invalid") return RewardLevel::Invalid;
  if (s == "Incomplete") return RewardLevel::Incomplete;
  if (s == "Longer") return RewardLevel::Longer;
  if (s == "Golden") return RewardLevel::Golden;
  throw DataError("unknown reward level: " + s);
}

std::string to_string(PairSource s) {
  return s == PairSource::AgentGenerated ? "AgentGenerated" : "SpaceSampled";
}

PairSource pair_source_from_string(const std::string& s) {
  if (s == "AgentGenerated") return PairSource::AgentGenerated;
  if (s == "SpaceSampled") return PairSource::SpaceSampled;
  throw DataError("unknown pair source: " + s);
}

CompletionSpec spec_from_flow(const GuiFlow& f) {
  if (f.terminal_page.empty()) {
    throw DataError("flow has no terminal page to derive a completion spec");
  }
  SubtaskSpec reach;
  reach.kind = SubtaskKind::Reach;
  reach.target_page = f.terminal_page;
  reach.task_text = f.task;
  CompletionSpec spec;
  spec.obligations.push_back(std::move(reach));
  return spec;
}

CompletionSpec completion_spec_for(const SubtaskSpec& s) {
  CompletionSpec spec;
  spec.obligations.push_back(s);
  if (s.kind == SubtaskKind::Operate && !s.required_action.has_value()) {
    throw DataError("Operate subtask without a required action");
  }
  return spec;
}

RewardScorer::RewardScorer(const GuiGraph& g, CompletionSpec spec)
    : g_(g), spec_(std::move(spec)) {
  if (spec_.obligations.empty()) {
    throw ConfigError("completion spec has no obligations");
  }
  if (spec_.max_search_depth < 0) {
    throw ConfigError("max_search_depth must be >= 0");
  }
  m_ = static_cast<int>(spec_.obligations.size());

  pages_.reserve(g_.pages().size());
  for (const auto& [id, page] : g_.pages()) {
    page_index_[id] = static_cast<int>(pages_.size());
    pages_.push_back(id);
  }
  obligation_page_.reserve(spec_.obligations.size());
  for (const auto& ob : spec_.obligations) {
    auto it = page_index_.find(ob.target_page);
    if (it == page_index_.end()) {
      throw UnknownPageError("completion spec targets unknown page: " +
                             ob.target_page);
    }
    if (ob.kind == SubtaskKind::Operate && !ob.required_action.has_value()) {
      throw DataError("Operate obligation without a required action");
    }
    obligation_page_.push_back(it->second);
  }

  // Shortest transition counts to full progress, by reverse BFS over the
  // (page, progress) product graph. Progress k==m states are the sources.
  const int n = static_cast<int>(pages_.size());
  const int states = n * (m_ + 1);
  rest_.assign(states, kInf);

  std::vector<std::vector<int>> reverse_adj(states);
  for (const auto& e : g_.edges()) {
    const int src = page_index_.at(e.src);
    const int dst = page_index_.at(e.dst);
    for (int k = 0; k <= m_; ++k) {
      const int next = absorb(dst, operate_check(k, src, e.action));
      reverse_adj[state_of(dst, next)].push_back(state_of(src, k));
    }
  }

  std::deque<int> queue;
  for (int p = 0; p < n; ++p) {
    rest_[state_of(p, m_)] = 0;
    queue.push_back(state_of(p, m_));
  }
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop_front();
    for (int prev : reverse_adj[s]) {
      if (rest_[prev] == kInf) {
        rest_[prev] = rest_[s] + 1;
        queue.push_back(prev);
      }
    }
  }
}

int RewardScorer::absorb(int page, int k) const {
  while (k < m_ && spec_.obligations[k].kind == SubtaskKind::Reach &&
         obligation_page_[k] == page) {
    ++k;
  }
  return k;
}

int RewardScorer::operate_check(int k, int page, const Action& executed) const {
  if (k < m_ && spec_.obligations[k].kind == SubtaskKind::Operate &&
      obligation_page_[k] == page &&
      operate_matches(*spec_.obligations[k].required_action, executed)) {
    return k + 1;
  }
  return k;
}

int RewardScorer::page_index(const std::string& page_id) const {
  auto it = page_index_.find(page_id);
  if (it == page_index_.end()) {
    throw UnknownPageError("page not in graph: " + page_id);
  }
  return it->second;
}

int RewardScorer::effective_depth(int golden) const {
  if (spec_.max_search_depth > 0) return spec_.max_search_depth;
  return std::max(golden, std::min(2 * golden, kDepthCeiling));
}

int RewardScorer::initial_progress(const std::string& start) const {
  return absorb(page_index(start), 0);
}

int RewardScorer::advance(int k, const std::string& src_page,
                          const Action& executed,
                          const std::string& dst_page) const {
  return absorb(page_index(dst_page),
                operate_check(k, page_index(src_page), executed));
}

int RewardScorer::progress_after(const GuiFlow& history) const {
  if (history.steps.empty()) {
    if (history.terminal_page.empty()) return 0;
    return absorb(page_index(history.terminal_page), 0);
  }
  int k = absorb(page_index(history.steps.front().page_id), 0);
  for (std::size_t i = 0; i < history.steps.size(); ++i) {
    const FlowStep& step = history.steps[i];
    const int here = page_index(step.page_id);
    k = operate_check(k, here, step.action);
    const std::string& next_id = (i + 1 < history.steps.size())
                                     ? history.steps[i + 1].page_id
                                     : history.terminal_page;
    if (next_id.empty()) {
      throw DataError("history flow has a step with no following page");
    }
    k = absorb(page_index(next_id), k);
  }
  return k;
}

std::optional<int> RewardScorer::golden_length(const std::string& start) const {
  const int p = page_index(start);
  const int r = rest_[state_of(p, absorb(p, 0))];
  if (r == kInf) return std::nullopt;
  const int total = r + 1;  // the terminating Complete counts as a step
  if (spec_.max_search_depth > 0 && total > spec_.max_search_depth) {
    return std::nullopt;
  }
  return total;
}

RewardLevel RewardScorer::classify(const std::string& page_id,
                                   const GuiFlow& history,
                                   const Action& a) const {
  const int page = page_index(page_id);
  if (!history.steps.empty() && history.terminal_page != page_id) {
    throw DataError("history does not end at " + page_id);
  }

  const std::string& start =
      history.steps.empty() ? page_id : history.steps.front().page_id;
  const auto golden = golden_length(start);
  if (!golden.has_value()) {
    throw NoGoldenFlowError("no completing flow from " + start);
  }
  const int h = static_cast<int>(history.steps.size());
  const int k = history.steps.empty() ? absorb(page, 0) : progress_after(history);
  const int depth = effective_depth(*golden);

  if (a.kind == ActionKind::Complete) {
    // Stopping now either seals a satisfied spec or abandons an unmet one.
    // A genuinely completed flow outranks the depth bound, which only
    // limits the search for future continuations.
    if (k != m_) return RewardLevel::Incomplete;
    return h + 1 == *golden ? RewardLevel::Golden : RewardLevel::Longer;
  }

  const GuiPage& here = g_.page(page_id);
  if (!action_in_space(a, here)) return RewardLevel::Invalid;

  // Edges whose target matches; Input transitions additionally need the
  // exact typed text. A matching target with only mismatched text is still
  // in the space, hence Incomplete rather than Invalid.
  bool target_seen = false;
  int best = kInf;
  for (std::size_t idx : g_.outgoing(page_id)) {
    const GraphEdge& e = g_.edges()[idx];
    if (!same_target(e.action, a)) continue;
    target_seen = true;
    if (a.kind == ActionKind::Input &&
        e.action.input_text.value_or("") != a.input_text.value_or("")) {
      continue;
    }
    const int next =
        absorb(page_index(e.dst), operate_check(k, page, e.action));
    best = std::min(best, rest_[state_of(page_index(e.dst), next)]);
  }
  if (!target_seen) return RewardLevel::Invalid;
  if (best == kInf) return RewardLevel::Incomplete;

  // history + this action + remaining transitions + Complete.
  const int total = h + 1 + best + 1;
  if (total > depth) return RewardLevel::Incomplete;
  return total == *golden ? RewardLevel::Golden : RewardLevel::Longer;
}

std::optional<int> golden_length(const GuiGraph& g, const std::string& start,
                                 const CompletionSpec& spec) {
  return RewardScorer(g, spec).golden_length(start);
}

RewardLevel classify_action(const GuiGraph& g, const std::string& page_id,
                            const GuiFlow& history, const Action& a,
                            const CompletionSpec& spec) {
  return RewardScorer(g, spec).classify(page_id, history, a);
}

std::vector<PreferencePair> build_preference_pairs(
    const GuiGraph& g, const std::vector<RegeneratedFlow>& flows,
    const std::function<CompletionSpec(const GuiFlow&)>& spec_fn,
    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<PreferencePair> out;

  for (const RegeneratedFlow& rf : flows) {
    const GuiFlow& flow = rf.golden;
    if (flow.steps.empty()) continue;
    RewardScorer scorer(g, spec_fn(flow));
    const auto golden = scorer.golden_length(flow.steps.front().page_id);
    if (!golden.has_value()) {
      throw NoGoldenFlowError("flow's own spec is unsatisfiable from " +
                              flow.steps.front().page_id);
    }

    // One slot per step plus the terminating Complete on the terminal page.
    const std::size_t slots = flow.steps.size() + 1;
    for (std::size_t t = 0; t < slots; ++t) {
      const bool terminal = t == flow.steps.size();
      const std::string& page_id =
          terminal ? flow.terminal_page : flow.steps[t].page_id;
      const Action golden_a =
          terminal ? Action::complete() : flow.steps[t].action;
      const GuiFlow history = flow_prefix(flow, t);

      const RewardLevel chosen_level =
          scorer.classify(page_id, history, golden_a);

      PreferencePair pair;
      pair.task = flow.task;
      pair.page_id = page_id;
      pair.chosen = golden_a;
      pair.chosen_level = chosen_level;
      pair.golden_length = *golden;

      if (t < rf.agent_actions.size() && rf.agent_actions[t].has_value()) {
        const Action& agent = *rf.agent_actions[t];
        const RewardLevel agent_level = scorer.classify(page_id, history, agent);
        if (agent_level < chosen_level) {
          pair.rejected = agent;
          pair.rejected_level = agent_level;
          pair.source = PairSource::AgentGenerated;
          out.push_back(std::move(pair));
          continue;
        }
      }

      std::vector<std::pair<Action, RewardLevel>> lower;
      for (const Action& cand : enumerate_action_space(g.page(page_id))) {
        const RewardLevel lvl = scorer.classify(page_id, history, cand);
        if (lvl < chosen_level) lower.emplace_back(cand, lvl);
      }
      if (lower.empty()) continue;  // nothing strictly worse to pair against
      const auto& pick = lower[rng() % lower.size()];
      pair.rejected = pick.first;
      pair.rejected_level = pick.second;
      pair.source = PairSource::SpaceSampled;
      out.push_back(std::move(pair));
    }
  }
  return out;
}

json pair_to_json(const PreferencePair& p) {
  json j;
  j["task"] = p.task;
  j["page"] = p.page_id;
  j["chosen"] = action_to_json(p.chosen);
  j["rejected"] = action_to_json(p.rejected);
  j["chosen_level"] = to_string(p.chosen_level);
  j["rejected_level"] = to_string(p.rejected_level);
  j["source"] = to_string(p.source);
  j["golden_length"] = p.golden_length;
  return j;
}

PreferencePair pair_from_json(const json& j) {
  if (!j.is_object()) throw DataError("preference pair is not an object");
  PreferencePair p;
  p.task = j.at("task").get<std::string>();
  p.page_id = j.at("page").get<std::string>();
  p.chosen = action_from_json(j.at("chosen"));
  p.rejected = action_from_json(j.at("rejected"));
  p.chosen_level = reward_level_from_string(j.at("chosen_level").get<std::string>());
  p.rejected_level =
      reward_level_from_string(j.at("rejected_level").get<std::string>());
  p.source = pair_source_from_string(j.at("source").get<std::string>());
  p.golden_length = j.at("golden_length").get<int>();
  if (!(p.chosen_level > p.rejected_level)) {
    throw DataError("preference pair violates level ordering");
  }
  return p;
}

}  // namespace guiflow
