#include "guiflow/policy.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "guiflow/action_space.hpp"
#include "guiflow/errors.hpp"
#include "guiflow/hash.hpp"
#include "guiflow/io.hpp"

namespace guiflow {

namespace {

constexpr std::uint64_t kFnvBasis = 0xcbf29ce484222325ull;

void add_token(SparseVec& v, const FeatureHasher& h, const std::string& token) {
  v[h.index(token)] += 1.0;
}

std::vector<std::string> lowercase_words(const std::string& text) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) words.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(static_cast<char>(
          std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// -log sigmoid(m), stable on both tails.
double softplus_neg(double m) {
  if (m >= 0.0) return std::log1p(std::exp(-m));
  return -m + std::log1p(std::exp(m));
}

struct Scored {
  std::vector<SparseVec> phis;
  std::vector<double> logprobs;
  std::vector<double> probs;
};

Scored score_candidates(const LinearPolicy& p, const std::string& task,
                        const GuiPage& page,
                        const std::vector<Action>& history,
                        const std::vector<Action>& candidates) {
  Scored out;
  out.phis.reserve(candidates.size());
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const Action& a : candidates) {
    out.phis.push_back(featurize(p.hasher, task, page, history, a));
    scores.push_back(score(p, out.phis.back()));
  }
  const double m = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double s : scores) sum += std::exp(s - m);
  const double lse = m + std::log(sum);
  out.logprobs.reserve(scores.size());
  out.probs.reserve(scores.size());
  for (double s : scores) {
    out.logprobs.push_back(s - lse);
    out.probs.push_back(std::exp(s - lse));
  }
  return out;
}

std::size_t exact_index(const std::vector<Action>& candidates,
                        const Action& a) {
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i] == a) return i;
  }
  throw ActionNotInSpaceError("query action missing from candidate set");
}

void axpy(std::vector<double>& w, double coeff, const SparseVec& phi) {
  for (const auto& [idx, val] : phi) w[idx] += coeff * val;
}

}  // namespace

int FeatureHasher::index(const std::string& token) const {
  return static_cast<int>(fnv1a64(token, kFnvBasis ^ seed) &
                          static_cast<std::uint64_t>(dim - 1));
}

void validate_hasher(const FeatureHasher& h) {
  if (h.dim <= 0 || (h.dim & (h.dim - 1)) != 0) {
    throw ConfigError("feature dim must be a positive power of two, got " +
                      std::to_string(h.dim));
  }
}

SparseVec featurize(const FeatureHasher& h, const std::string& task,
                    const GuiPage& page, const std::vector<Action>& history,
                    const Action& a) {
  validate_hasher(h);
  SparseVec v;
  for (const std::string& w : lowercase_words(task)) {
    add_token(v, h, "task:" + w);
  }
  add_token(v, h, "page:" + page.page_id);
  for (const Element& el : page.elements) {
    if (!el.name.empty()) add_token(v, h, "pelem:" + el.name);
  }
  add_token(v, h, "act:kind:" + to_string(a.kind));
  if (!a.element_name.empty()) add_token(v, h, "act:name:" + a.element_name);
  add_token(v, h, "act:bounds:" + bbox_to_string(a.bounds));
  if (a.direction.has_value()) {
    add_token(v, h, "act:dir:" + to_string(*a.direction));
  }
  if (a.input_text.has_value() && !a.input_text->empty()) {
    add_token(v, h, "act:text:" + *a.input_text);
  }
  if (a.complete_text.has_value() && !a.complete_text->empty()) {
    add_token(v, h, "act:text:" + *a.complete_text);
  }
  // Most recent action first, three slots.
  for (std::size_t i = 0; i < 3 && i < history.size(); ++i) {
    const Action& past = history[history.size() - 1 - i];
    add_token(v, h, "hist" + std::to_string(i) + ":" + action_signature(past));
  }
  return v;
}

LinearPolicy::LinearPolicy(FeatureHasher h, double beta_)
    : hasher(h), beta(beta_) {
  validate_hasher(hasher);
  if (!(beta > 0.0)) {
    throw ConfigError("beta must be positive");
  }
  weights.assign(static_cast<std::size_t>(hasher.dim), 0.0);
}

double score(const LinearPolicy& p, const SparseVec& phi) {
  double s = 0.0;
  for (const auto& [idx, val] : phi) s += p.weights[idx] * val;
  return s;
}

std::vector<ScoredAction> action_logprobs(const LinearPolicy& p,
                                          const std::string& task,
                                          const GuiPage& page,
                                          const std::vector<Action>& history) {
  const std::vector<Action> candidates = enumerate_action_space(page);
  const Scored sc = score_candidates(p, task, page, history, candidates);
  std::vector<ScoredAction> out;
  out.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out.push_back({candidates[i], sc.logprobs[i]});
  }
  return out;
}

std::vector<Action> candidate_actions(const GuiPage& page,
                                      const std::vector<Action>& queries) {
  std::vector<Action> cands = enumerate_action_space(page);
  std::vector<bool> claimed(cands.size(), false);
  for (const Action& q : queries) {
    bool placed = false;
    for (std::size_t j = 0; j < cands.size(); ++j) {
      if (cands[j] == q) {
        claimed[j] = true;
        placed = true;
        break;
      }
    }
    if (placed) continue;
    // The query's free text differs from the enumerated placeholder; bind
    // it into the matching slot, or append when another query took it.
    bool target_exists = false;
    for (std::size_t j = 0; j < cands.size(); ++j) {
      if (!same_target(cands[j], q)) continue;
      target_exists = true;
      if (!claimed[j]) {
        cands[j] = q;
        claimed[j] = true;
        placed = true;
        break;
      }
    }
    if (placed) continue;
    if (target_exists) {
      cands.push_back(q);
      claimed.push_back(true);
      continue;
    }
    throw ActionNotInSpaceError("action targets nothing on page " +
                                page.page_id + ": " + action_signature(q));
  }
  return cands;
}

std::vector<SftExample> sft_examples_from_flow(const GuiFlow& f) {
  std::vector<SftExample> out;
  out.reserve(f.steps.size() + 1);
  std::vector<Action> history;
  for (const FlowStep& s : f.steps) {
    out.push_back({f.task, s.page_id, history, s.action});
    history.push_back(s.action);
  }
  if (f.terminal_page.empty()) {
    throw DataError("flow has no terminal page");
  }
  out.push_back({f.task, f.terminal_page, history, Action::complete()});
  return out;
}

std::pair<double, std::vector<double>> sft_loss_and_grad(
    const LinearPolicy& p, const GuiGraph& g,
    const std::vector<SftExample>& batch) {
  if (batch.empty()) throw ConfigError("empty SFT batch");
  double loss = 0.0;
  std::vector<double> grad(p.weights.size(), 0.0);
  for (const SftExample& ex : batch) {
    const GuiPage& page = g.page(ex.page_id);
    std::vector<Action> candidates;
    try {
      candidates = candidate_actions(page, {ex.golden});
    } catch (const ActionNotInSpaceError& e) {
      throw GoldenNotInSpaceError(e.what());
    }
    const Scored sc = score_candidates(p, ex.task, page, ex.history, candidates);
    const std::size_t gi = exact_index(candidates, ex.golden);
    loss -= sc.logprobs[gi];
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      const double coeff = sc.probs[j] - (j == gi ? 1.0 : 0.0);
      axpy(grad, coeff, sc.phis[j]);
    }
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  loss *= inv;
  for (double& w : grad) w *= inv;
  return {loss, std::move(grad)};
}

namespace {

// Margin and the two feature vectors it differentiates through.
struct MarginParts {
  double margin;
  SparseVec phi_chosen;
  SparseVec phi_rejected;
};

MarginParts margin_parts(const LinearPolicy& p, const LinearPolicy& ref,
                         const GuiGraph& g, const DpoExample& ex) {
  if (ex.chosen == ex.rejected) {
    throw DataError("preference pair with identical chosen and rejected");
  }
  const GuiPage& page = g.page(ex.page_id);
  const std::vector<Action> candidates =
      candidate_actions(page, {ex.chosen, ex.rejected});
  const std::vector<Action> no_history;
  const Scored theta = score_candidates(p, ex.task, page, no_history, candidates);
  const Scored frozen =
      score_candidates(ref, ex.task, page, no_history, candidates);
  const std::size_t wi = exact_index(candidates, ex.chosen);
  const std::size_t li = exact_index(candidates, ex.rejected);
  const double margin =
      p.beta * ((theta.logprobs[wi] - frozen.logprobs[wi]) -
                (theta.logprobs[li] - frozen.logprobs[li]));
  return {margin, theta.phis[wi], theta.phis[li]};
}

}  // namespace

std::pair<double, std::vector<double>> dpo_loss_and_grad(
    const LinearPolicy& p, const LinearPolicy& ref, const GuiGraph& g,
    const std::vector<DpoExample>& batch) {
  if (batch.empty()) throw ConfigError("empty DPO batch");
  double loss = 0.0;
  std::vector<double> grad(p.weights.size(), 0.0);
  for (const DpoExample& ex : batch) {
    const MarginParts mp = margin_parts(p, ref, g, ex);
    loss += softplus_neg(mp.margin);
    // d(-log sigmoid(m))/dm = sigmoid(m) - 1; the softmax mean cancels in
    // the chosen-minus-rejected difference because both share one
    // candidate distribution.
    const double coeff = (sigmoid(mp.margin) - 1.0) * p.beta;
    axpy(grad, coeff, mp.phi_chosen);
    axpy(grad, -coeff, mp.phi_rejected);
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  loss *= inv;
  for (double& w : grad) w *= inv;
  return {loss, std::move(grad)};
}

double dpo_margin(const LinearPolicy& p, const LinearPolicy& ref,
                  const GuiGraph& g, const DpoExample& ex) {
  return margin_parts(p, ref, g, ex).margin;
}

namespace {

template <typename LossFn>
TrainResult descend(LinearPolicy policy, const TrainConfig& cfg, LossFn fn) {
  if (cfg.steps < 0) throw ConfigError("steps must be >= 0");
  TrainResult result{std::move(policy), {}};
  result.loss_curve.reserve(static_cast<std::size_t>(cfg.steps));
  for (int s = 0; s < cfg.steps; ++s) {
    auto [loss, grad] = fn(result.policy);
    result.loss_curve.push_back(loss);
    for (std::size_t i = 0; i < grad.size(); ++i) {
      result.policy.weights[i] -= cfg.lr * grad[i];
    }
  }
  return result;
}

}  // namespace

TrainResult train_sft(LinearPolicy init, const GuiGraph& g,
                      const std::vector<SftExample>& data,
                      const TrainConfig& cfg) {
  if (data.empty()) throw ConfigError("empty SFT dataset");
  return descend(std::move(init), cfg, [&](const LinearPolicy& p) {
    return sft_loss_and_grad(p, g, data);
  });
}

TrainResult train_dpo(LinearPolicy init, const GuiGraph& g,
                      const std::vector<DpoExample>& data,
                      const TrainConfig& cfg) {
  if (data.empty()) throw ConfigError("empty DPO dataset");
  const LinearPolicy ref = init;  // frozen SFT reference
  return descend(std::move(init), cfg, [&](const LinearPolicy& p) {
    return dpo_loss_and_grad(p, ref, g, data);
  });
}

json policy_to_json(const LinearPolicy& p) {
  json j;
  j["version"] = 1;
  j["dim"] = p.hasher.dim;
  j["hash_seed"] = p.hasher.seed;
  j["beta"] = p.beta;
  j["weights"] = p.weights;
  return j;
}

LinearPolicy policy_from_json(const json& j) {
  if (!j.is_object() || j.value("version", 0) != 1) {
    throw DataError("unsupported policy checkpoint version");
  }
  FeatureHasher h;
  h.dim = j.at("dim").get<int>();
  h.seed = j.at("hash_seed").get<std::uint64_t>();
  LinearPolicy p(h, j.at("beta").get<double>());
  p.weights = j.at("weights").get<std::vector<double>>();
  if (p.weights.size() != static_cast<std::size_t>(h.dim)) {
    throw DataError("policy weights length does not match dim");
  }
  for (double w : p.weights) {
    if (!std::isfinite(w)) throw DataError("non-finite policy weight");
  }
  return p;
}

void save_policy(const LinearPolicy& p, const std::string& path) {
  write_file(path, policy_to_json(p).dump(2) + "\n");
}

LinearPolicy load_policy(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw DataError(std::string("bad policy checkpoint: ") + e.what());
  }
  return policy_from_json(j);
}

}  // namespace guiflow
