#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "guiflow/io.hpp"
#include "guiflow/model.hpp"

namespace guiflow {

// Sparse hashed feature vector: index -> count.
using SparseVec = std::map<int, double>;

// Hashes namespaced string tokens into a fixed-size index space. dim must be
// a power of two so masking replaces modulo.
struct FeatureHasher {
  int dim = 4096;
  std::uint64_t seed = 0;

  int index(const std::string& token) const;
};

// Throws ConfigError unless dim is a positive power of two.
void validate_hasher(const FeatureHasher& h);

// Bag of hashed tokens from the task text, the page identity and element
// names, the last three history actions, and the candidate action itself.
// Collisions are possible but rare at the default dim; distinctness is
// probabilistic, not guaranteed.
SparseVec featurize(const FeatureHasher& h, const std::string& task,
                    const GuiPage& page, const std::vector<Action>& history,
                    const Action& a);

// Linear softmax policy over a page's candidate actions. beta is the DPO
// temperature; a frozen copy of the policy serves as the reference.
struct LinearPolicy {
  FeatureHasher hasher;
  std::vector<double> weights;  // length hasher.dim
  double beta = 0.1;

  explicit LinearPolicy(FeatureHasher h = {}, double beta_ = 0.1);
};

double score(const LinearPolicy& p, const SparseVec& phi);

struct ScoredAction {
  Action action;
  double logprob;
};

// Softmax log-probabilities over the page's enumerated action space, in
// enumeration order.
std::vector<ScoredAction> action_logprobs(const LinearPolicy& p,
                                          const std::string& task,
                                          const GuiPage& page,
                                          const std::vector<Action>& history);

// The page's action space with each query action bound into it: a query
// already present stays, a query whose target is enumerated with different
// free text takes that slot (or is appended when the slot is taken), and a
// query addressing no enumerated target throws ActionNotInSpaceError.
std::vector<Action> candidate_actions(const GuiPage& page,
                                      const std::vector<Action>& queries);

struct SftExample {
  std::string task;
  std::string page_id;
  std::vector<Action> history;
  Action golden;
};

// DPO contexts condition on (task, page) only; preference pairs carry no
// history.
struct DpoExample {
  std::string task;
  std::string page_id;
  Action chosen;
  Action rejected;
};

// One SFT example per flow step plus a terminal Complete example, with the
// golden action prefix as history.
std::vector<SftExample> sft_examples_from_flow(const GuiFlow& f);

// Mean cross-entropy of the golden actions and its exact gradient.
// Throws GoldenNotInSpaceError when a golden action has no target on its
// page, UnknownPageError for unknown page ids, ConfigError on empty batch.
std::pair<double, std::vector<double>> sft_loss_and_grad(
    const LinearPolicy& p, const GuiGraph& g,
    const std::vector<SftExample>& batch);

// Mean DPO loss -log sigmoid(beta * (chosen log-ratio - rejected log-ratio))
// against the frozen reference, and its exact gradient w.r.t. p's weights.
std::pair<double, std::vector<double>> dpo_loss_and_grad(
    const LinearPolicy& p, const LinearPolicy& ref, const GuiGraph& g,
    const std::vector<DpoExample>& batch);

// Implied-reward margin beta * (chosen log-ratio - rejected log-ratio).
double dpo_margin(const LinearPolicy& p, const LinearPolicy& ref,
                  const GuiGraph& g, const DpoExample& ex);

struct TrainConfig {
  int steps = 100;
  double lr = 0.1;
  // Full-batch descent needs no randomness; the seed is recorded in run
  // manifests so the interface stays stable if minibatching ever lands.
  std::uint64_t seed = 0;
};

struct TrainResult {
  LinearPolicy policy;
  std::vector<double> loss_curve;  // loss before each update, steps entries
};

TrainResult train_sft(LinearPolicy init, const GuiGraph& g,
                      const std::vector<SftExample>& data,
                      const TrainConfig& cfg);

TrainResult train_dpo(LinearPolicy init, const GuiGraph& g,
                      const std::vector<DpoExample>& data,
                      const TrainConfig& cfg);

// Versioned JSON checkpoints carrying dim, hash seed, beta, and weights.
json policy_to_json(const LinearPolicy& p);
LinearPolicy policy_from_json(const json& j);
void save_policy(const LinearPolicy& p, const std::string& path);
LinearPolicy load_policy(const std::string& path);

}  // namespace guiflow
