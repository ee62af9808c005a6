#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "guiflow/action_space.hpp"
#include "guiflow/bridge.hpp"
#include "guiflow/episode.hpp"
#include "guiflow/errors.hpp"
#include "guiflow/io.hpp"
#include "guiflow/metrics.hpp"
#include "guiflow/model.hpp"
#include "guiflow/policy.hpp"
#include "guiflow/reward.hpp"
#include "guiflow/sampler.hpp"
#include "guiflow/subtask.hpp"

namespace {

constexpr const char* kToolVersion = "0.1.0";

using guiflow::json;

struct CommonArgs {
  std::string graph_path;
  std::string out_dir = ".";
  std::string config_path;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> config;  // loaded from config_path
};

void add_common(CLI::App* cmd, CommonArgs* args, bool graph_required = true) {
  auto* g = cmd->add_option("--graph", args->graph_path, "graph JSON file");
  if (graph_required) g->required();
  cmd->add_option("--out", args->out_dir, "output directory");
  cmd->add_option("--seed", args->seed, "RNG seed");
  cmd->add_option("--config", args->config_path, "flat key=value config file");
}

void load_common_config(CommonArgs* args) {
  if (!args->config_path.empty()) {
    args->config = guiflow::load_config(args->config_path);
  }
  std::filesystem::create_directories(args->out_dir);
}

std::string out_path(const CommonArgs& args, const std::string& name) {
  return (std::filesystem::path(args.out_dir) / name).string();
}

// Flag beats config file beats built-in default.
long long resolve_int(const CLI::App& cmd, const std::string& flag,
                      const CommonArgs& args, const std::string& key,
                      long long flag_value) {
  if (cmd.count(flag) > 0) return flag_value;
  return guiflow::config_int(args.config, key, flag_value);
}

double resolve_double(const CLI::App& cmd, const std::string& flag,
                      const CommonArgs& args, const std::string& key,
                      double flag_value) {
  if (cmd.count(flag) > 0) return flag_value;
  return guiflow::config_double(args.config, key, flag_value);
}

std::string resolve_str(const CLI::App& cmd, const std::string& flag,
                        const CommonArgs& args, const std::string& key,
                        std::string flag_value) {
  if (cmd.count(flag) > 0) return flag_value;
  return guiflow::config_str(args.config, key, flag_value);
}

bool resolve_bool(const CLI::App& cmd, const std::string& flag,
                  const CommonArgs& args, const std::string& key,
                  bool flag_value) {
  if (cmd.count(flag) > 0) return flag_value;
  return guiflow::config_bool(args.config, key, flag_value);
}

guiflow::RunManifest start_manifest(const std::string& command,
                                    const CommonArgs& args) {
  guiflow::RunManifest m;
  m.command = command;
  m.tool_version = kToolVersion;
  m.seed = args.seed;
  if (!args.graph_path.empty()) {
    m.inputs[args.graph_path] = guiflow::sha256_file(args.graph_path);
  }
  if (!args.config_path.empty()) {
    m.inputs[args.config_path] = guiflow::sha256_file(args.config_path);
  }
  return m;
}

void finish_manifest(guiflow::RunManifest m, const CommonArgs& args,
                     const std::vector<std::string>& outputs) {
  for (const std::string& path : outputs) {
    m.outputs[path] = guiflow::sha256_file(path);
  }
  guiflow::write_manifest(out_path(args, m.command + ".manifest.json"), m);
}

std::vector<guiflow::GuiFlow> read_flows(const std::string& path) {
  std::vector<guiflow::GuiFlow> flows;
  for (const json& j : guiflow::read_jsonl(path)) {
    flows.push_back(guiflow::flow_from_json(j));
  }
  return flows;
}

std::vector<std::string> split_whitespace(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

// Agent spec: golden | random | policy:<ckpt> | exec:<cmd> | tcp:<host:port>.
// "golden" has no standalone agent object; callers construct a replay agent
// per gold flow.
std::unique_ptr<guiflow::Agent> make_agent(const std::string& spec,
                                           std::uint64_t seed, double timeout,
                                           bool* is_golden) {
  *is_golden = false;
  if (spec == "golden") {
    *is_golden = true;
    return nullptr;
  }
  if (spec == "random") {
    return std::make_unique<guiflow::RandomAgent>(seed);
  }
  if (spec.rfind("policy:", 0) == 0) {
    return std::make_unique<guiflow::PolicyAgent>(
        guiflow::load_policy(spec.substr(7)));
  }
  guiflow::BridgeConfig bc;
  bc.timeout_seconds = timeout;
  if (spec.rfind("exec:", 0) == 0) {
    const std::vector<std::string> argv = split_whitespace(spec.substr(5));
    return std::make_unique<guiflow::BridgeAgent>(
        std::make_unique<guiflow::ProcessTransport>(argv), bc);
  }
  if (spec.rfind("tcp:", 0) == 0) {
    const std::string addr = spec.substr(4);
    const std::size_t colon = addr.rfind(':');
    if (colon == std::string::npos) {
      throw guiflow::ConfigError("tcp agent needs host:port, got " + addr);
    }
    int port = 0;
    try {
      port = std::stoi(addr.substr(colon + 1));
    } catch (const std::exception&) {
      throw guiflow::ConfigError("bad tcp port in " + addr);
    }
    return std::make_unique<guiflow::BridgeAgent>(
        std::make_unique<guiflow::TcpTransport>(addr.substr(0, colon), port),
        bc);
  }
  throw guiflow::ConfigError(
      "unknown agent spec '" + spec +
      "' (expected golden|random|policy:<ckpt>|exec:<cmd>|tcp:<host:port>)");
}

int cmd_build_dataset(const CLI::App& cmd, CommonArgs& args, long long count,
                      long long min_len, long long max_len,
                      long long max_attempts, long long max_task_len) {
  load_common_config(&args);
  count = resolve_int(cmd, "--count", args, "count", count);
  guiflow::SamplerConfig sc;
  sc.min_len = static_cast<int>(resolve_int(cmd, "--min-len", args, "min_len",
                                            min_len));
  sc.max_len = static_cast<int>(resolve_int(cmd, "--max-len", args, "max_len",
                                            max_len));
  sc.max_attempts = static_cast<int>(
      resolve_int(cmd, "--max-attempts", args, "max_attempts", max_attempts));
  sc.max_task_len = static_cast<std::size_t>(resolve_int(
      cmd, "--max-task-len", args, "max_task_len", max_task_len));
  sc.seed = args.seed;
  if (count <= 0) throw guiflow::ConfigError("count must be positive");

  const guiflow::GuiGraph g = guiflow::load_graph(args.graph_path);
  guiflow::FlowSampler sampler(g, sc);
  std::vector<guiflow::GuiFlow> flows =
      sampler.sample(static_cast<std::size_t>(count));
  const guiflow::TemplateTaskTextGenerator gen;
  for (guiflow::GuiFlow& f : flows) guiflow::attach_task_text(&f, g, gen);
  flows = guiflow::filter_tasks(std::move(flows), sampler.registry(),
                                sc.max_task_len);

  std::vector<json> records;
  records.reserve(flows.size());
  long long steps = 0;
  for (const guiflow::GuiFlow& f : flows) {
    steps += static_cast<long long>(f.steps.size());
    records.push_back(guiflow::flow_to_json(f));
  }
  const std::string flows_path = out_path(args, "flows.jsonl");
  guiflow::write_jsonl(flows_path, records);

  std::cout << "chains: " << flows.size() << "\n";
  std::cout << "steps: " << steps << "\n";
  std::cout << "steps per task: "
            << (flows.empty() ? 0.0
                              : static_cast<double>(steps) /
                                    static_cast<double>(flows.size()))
            << "\n";

  guiflow::RunManifest m = start_manifest("build-dataset", args);
  m.config = {{"count", std::to_string(count)},
              {"min_len", std::to_string(sc.min_len)},
              {"max_len", std::to_string(sc.max_len)},
              {"max_attempts", std::to_string(sc.max_attempts)},
              {"max_task_len", std::to_string(sc.max_task_len)}};
  finish_manifest(std::move(m), args, {flows_path});
  return 0;
}

int cmd_extract_subtasks(const CLI::App& cmd, CommonArgs& args,
                         const std::string& flows_path,
                         const std::string& known_names_path,
                         double jaccard) {
  load_common_config(&args);
  guiflow::SubtaskExtractorConfig xc;
  xc.seed = args.seed;
  xc.similarity.jaccard_threshold =
      resolve_double(cmd, "--jaccard", args, "jaccard_threshold", jaccard);
  if (!known_names_path.empty()) {
    std::istringstream in(guiflow::read_file(known_names_path));
    std::string line;
    while (std::getline(in, line)) {
      const std::string name = guiflow::trim(line);
      if (!name.empty()) xc.known_names.push_back(name);
    }
  }

  const guiflow::GuiGraph g = guiflow::load_graph(args.graph_path);
  const std::vector<guiflow::GuiFlow> flows = read_flows(flows_path);
  guiflow::SubtaskExtractor extractor(g, xc);

  std::vector<json> records;
  long long reach = 0;
  long long operate = 0;
  for (const guiflow::GuiFlow& f : flows) {
    for (const guiflow::SubtaskSpec& s : extractor.extract_all(f)) {
      (s.kind == guiflow::SubtaskKind::Reach ? reach : operate) += 1;
      records.push_back(guiflow::subtask_to_json(s));
    }
  }
  const std::string subtasks_path = out_path(args, "subtasks.jsonl");
  guiflow::write_jsonl(subtasks_path, records);

  std::cout << "reach: " << reach << "\n";
  std::cout << "operate: " << operate << "\n";

  guiflow::RunManifest m = start_manifest("extract-subtasks", args);
  m.inputs[flows_path] = guiflow::sha256_file(flows_path);
  if (!known_names_path.empty()) {
    m.inputs[known_names_path] = guiflow::sha256_file(known_names_path);
  }
  m.config = {{"jaccard_threshold",
               std::to_string(xc.similarity.jaccard_threshold)}};
  finish_manifest(std::move(m), args, {subtasks_path});
  return 0;
}

int cmd_build_prefs(const CLI::App& cmd, CommonArgs& args,
                    const std::string& flows_path, const std::string& agent,
                    double timeout) {
  load_common_config(&args);
  timeout = resolve_double(cmd, "--timeout", args, "timeout_seconds", timeout);

  const guiflow::GuiGraph g = guiflow::load_graph(args.graph_path);
  const std::vector<guiflow::GuiFlow> flows = read_flows(flows_path);

  bool is_golden = false;
  std::unique_ptr<guiflow::Agent> bridged =
      make_agent(agent, args.seed, timeout, &is_golden);

  std::vector<guiflow::RegeneratedFlow> regen;
  regen.reserve(flows.size());
  long long failed_flows = 0;
  for (std::size_t i = 0; i < flows.size(); ++i) {
    const guiflow::GuiFlow& f = flows[i];
    std::unique_ptr<guiflow::Agent> replay;
    guiflow::Agent* a = bridged.get();
    if (is_golden) {
      replay = std::make_unique<guiflow::GoldenReplayAgent>(f);
      a = replay.get();
    }
    guiflow::RegeneratedFlow rf{f, {}};
    // Teacher-forced regeneration: the agent predicts each step given the
    // golden prefix, including the terminal Complete slot.
    std::vector<guiflow::Action> history;
    try {
      for (std::size_t t = 0; t <= f.steps.size(); ++t) {
        const bool terminal = t == f.steps.size();
        const std::string& page_id =
            terminal ? f.terminal_page : f.steps[t].page_id;
        const guiflow::GuiPage& page = g.page(page_id);
        rf.agent_actions.push_back(a->decide(
            f.task, page, guiflow::enumerate_action_space(page), history));
        history.push_back(terminal ? guiflow::Action::complete()
                                   : f.steps[t].action);
      }
    } catch (const guiflow::AgentError& e) {
      ++failed_flows;
      std::cerr << "flow " << i << " (" << f.task
                << "): agent failed: " << e.what() << "\n";
    }
    regen.push_back(std::move(rf));
  }

  const std::vector<guiflow::PreferencePair> pairs =
      guiflow::build_preference_pairs(g, regen, guiflow::spec_from_flow,
                                      args.seed);
  long long agent_generated = 0;
  std::vector<json> records;
  records.reserve(pairs.size());
  for (const guiflow::PreferencePair& p : pairs) {
    if (p.source == guiflow::PairSource::AgentGenerated) ++agent_generated;
    records.push_back(guiflow::pair_to_json(p));
  }
  const std::string prefs_path = out_path(args, "prefs.jsonl");
  guiflow::write_jsonl(prefs_path, records);

  std::cout << "pairs: " << pairs.size() << "\n";
  std::cout << "agent_generated: " << agent_generated << "\n";
  std::cout << "space_sampled: "
            << static_cast<long long>(pairs.size()) - agent_generated << "\n";
  if (failed_flows > 0) {
    std::cout << "failed_flows: " << failed_flows << " (output is partial)\n";
  }

  guiflow::RunManifest m = start_manifest("build-prefs", args);
  m.inputs[flows_path] = guiflow::sha256_file(flows_path);
  m.config = {{"agent", agent}, {"timeout_seconds", std::to_string(timeout)}};
  finish_manifest(std::move(m), args, {prefs_path});
  return failed_flows > 0 ? 3 : 0;
}

int cmd_train(const CLI::App& cmd, CommonArgs& args,
              const std::string& data_path, const std::string& objective,
              const std::string& init_path, long long steps, double lr,
              double beta, long long dim) {
  load_common_config(&args);
  guiflow::TrainConfig tc;
  tc.steps = static_cast<int>(resolve_int(cmd, "--steps", args, "steps", steps));
  tc.lr = resolve_double(cmd, "--lr", args, "lr", lr);
  tc.seed = args.seed;
  beta = resolve_double(cmd, "--beta", args, "beta", beta);
  dim = resolve_int(cmd, "--dim", args, "dim", dim);

  const guiflow::GuiGraph g = guiflow::load_graph(args.graph_path);
  guiflow::LinearPolicy init = [&] {
    if (!init_path.empty()) return guiflow::load_policy(init_path);
    guiflow::FeatureHasher h;
    h.dim = static_cast<int>(dim);
    h.seed = args.seed;
    return guiflow::LinearPolicy(h, beta);
  }();

  guiflow::TrainResult res = [&] {
    if (objective == "sft") {
      std::vector<guiflow::SftExample> examples;
      for (const guiflow::GuiFlow& f : read_flows(data_path)) {
        for (guiflow::SftExample& ex : guiflow::sft_examples_from_flow(f)) {
          examples.push_back(std::move(ex));
        }
      }
      return guiflow::train_sft(std::move(init), g, examples, tc);
    }
    std::vector<guiflow::DpoExample> pairs;
    for (const json& j : guiflow::read_jsonl(data_path)) {
      const guiflow::PreferencePair p = guiflow::pair_from_json(j);
      pairs.push_back({p.task, p.page_id, p.chosen, p.rejected});
    }
    return guiflow::train_dpo(std::move(init), g, pairs, tc);
  }();

  const std::string ckpt_path = out_path(args, "policy.json");
  guiflow::save_policy(res.policy, ckpt_path);
  std::ostringstream csv;
  csv << "step,loss\n";
  for (std::size_t i = 0; i < res.loss_curve.size(); ++i) {
    csv << i << "," << res.loss_curve[i] << "\n";
  }
  const std::string csv_path = out_path(args, "loss.csv");
  guiflow::write_file(csv_path, csv.str());

  if (!res.loss_curve.empty()) {
    std::cout << "first loss: " << res.loss_curve.front() << "\n";
    std::cout << "last loss: " << res.loss_curve.back() << "\n";
  }

  guiflow::RunManifest m = start_manifest("train", args);
  m.inputs[data_path] = guiflow::sha256_file(data_path);
  if (!init_path.empty()) {
    m.inputs[init_path] = guiflow::sha256_file(init_path);
  }
  m.config = {{"objective", objective},
              {"steps", std::to_string(tc.steps)},
              {"lr", std::to_string(tc.lr)},
              {"beta", std::to_string(beta)},
              {"dim", std::to_string(dim)}};
  finish_manifest(std::move(m), args, {ckpt_path, csv_path});
  return 0;
}

int cmd_eval(const CLI::App& cmd, CommonArgs& args,
             const std::string& flows_path, const std::string& agent,
             long long max_steps, bool strict, double margin,
             const std::string& iou_mode, double timeout) {
  load_common_config(&args);
  guiflow::EpisodeConfig ec;
  ec.max_steps = static_cast<int>(
      resolve_int(cmd, "--max-steps", args, "max_steps", max_steps));
  ec.invalid_action_policy =
      resolve_bool(cmd, "--strict", args, "strict", strict)
          ? guiflow::InvalidActionPolicy::Strict
          : guiflow::InvalidActionPolicy::Lenient;
  guiflow::JudgeConfig jc;
  jc.margin = resolve_double(cmd, "--margin", args, "margin", margin);
  jc.iou_mode = guiflow::iou_mode_from_string(
      resolve_str(cmd, "--iou-mode", args, "iou_mode", iou_mode));
  jc.step_cap = ec.max_steps;
  timeout = resolve_double(cmd, "--timeout", args, "timeout_seconds", timeout);

  const guiflow::GuiGraph g = guiflow::load_graph(args.graph_path);
  const std::vector<guiflow::GuiFlow> golds = read_flows(flows_path);
  bool is_golden = false;
  std::unique_ptr<guiflow::Agent> bridged =
      make_agent(agent, args.seed, timeout, &is_golden);

  std::vector<guiflow::EpisodeTrace> traces;
  std::vector<guiflow::CompletionSpec> specs;
  traces.reserve(golds.size());
  specs.reserve(golds.size());
  for (const guiflow::GuiFlow& f : golds) {
    std::unique_ptr<guiflow::Agent> replay;
    guiflow::Agent* a = bridged.get();
    if (is_golden) {
      replay = std::make_unique<guiflow::GoldenReplayAgent>(f);
      a = replay.get();
    }
    const std::string start = guiflow::flow_pages(f).front();
    traces.push_back(guiflow::run_episode(g, *a, f.task, ec, start));
    specs.push_back(guiflow::spec_from_flow(f));
  }

  const guiflow::MetricReport report =
      guiflow::score_run(traces, golds, specs, g, jc);

  std::vector<json> trace_records;
  trace_records.reserve(traces.size());
  for (const guiflow::EpisodeTrace& t : traces) {
    trace_records.push_back(guiflow::trace_to_json(t));
  }
  const std::string traces_path = out_path(args, "traces.jsonl");
  guiflow::write_jsonl(traces_path, trace_records);

  // Per-step judgments for error analysis.
  std::vector<json> judgment_records;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    const guiflow::FlowScore fs =
        guiflow::score_flow(traces[i], golds[i], specs[i], g, jc);
    for (std::size_t s = 0; s < fs.steps.size(); ++s) {
      json rec;
      rec["task"] = golds[i].task;
      rec["step"] = s;
      rec["iou_ok"] = fs.steps[s].iou_ok;
      rec["text_ok"] = fs.steps[s].text_ok;
      judgment_records.push_back(std::move(rec));
    }
  }
  const std::string judgments_path = out_path(args, "judgments.jsonl");
  guiflow::write_jsonl(judgments_path, judgment_records);

  const std::string metrics_path = out_path(args, "metrics.json");
  guiflow::write_file(metrics_path,
                      guiflow::report_to_json(report).dump(2) + "\n");
  std::cout << guiflow::report_table(report);

  guiflow::RunManifest m = start_manifest("eval", args);
  m.inputs[flows_path] = guiflow::sha256_file(flows_path);
  m.config = {{"agent", agent},
              {"max_steps", std::to_string(ec.max_steps)},
              {"strict", ec.invalid_action_policy ==
                                 guiflow::InvalidActionPolicy::Strict
                             ? "true"
                             : "false"},
              {"margin", std::to_string(jc.margin)},
              {"iou_mode", guiflow::to_string(jc.iou_mode)},
              {"timeout_seconds", std::to_string(timeout)}};
  finish_manifest(std::move(m), args, {traces_path, judgments_path,
                                       metrics_path});
  return 0;
}

int cmd_run_episode(const CLI::App& cmd, CommonArgs& args,
                    const std::string& task, const std::string& agent,
                    const std::string& start, long long max_steps, bool strict,
                    double timeout) {
  load_common_config(&args);
  guiflow::EpisodeConfig ec;
  ec.max_steps = static_cast<int>(
      resolve_int(cmd, "--max-steps", args, "max_steps", max_steps));
  ec.invalid_action_policy =
      resolve_bool(cmd, "--strict", args, "strict", strict)
          ? guiflow::InvalidActionPolicy::Strict
          : guiflow::InvalidActionPolicy::Lenient;
  timeout = resolve_double(cmd, "--timeout", args, "timeout_seconds", timeout);

  const guiflow::GuiGraph g = guiflow::load_graph(args.graph_path);
  bool is_golden = false;
  std::unique_ptr<guiflow::Agent> a =
      make_agent(agent, args.seed, timeout, &is_golden);
  if (is_golden) {
    throw guiflow::ConfigError(
        "run-episode has no gold flow to replay; use eval --agent golden");
  }

  const guiflow::EpisodeTrace trace =
      guiflow::run_episode(g, *a, task, ec, start);
  const std::string trace_path = out_path(args, "trace.jsonl");
  guiflow::write_jsonl(trace_path, {guiflow::trace_to_json(trace)});

  std::cout << "steps: " << trace.visited.size() << "\n";
  std::cout << "terminated_by: " << guiflow::to_string(trace.terminated_by)
            << "\n";

  guiflow::RunManifest m = start_manifest("run-episode", args);
  m.config = {{"agent", agent},
              {"task", task},
              {"max_steps", std::to_string(ec.max_steps)},
              {"strict", ec.invalid_action_policy ==
                                 guiflow::InvalidActionPolicy::Strict
                             ? "true"
                             : "false"},
              {"timeout_seconds", std::to_string(timeout)}};
  finish_manifest(std::move(m), args, {trace_path});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GUI-flow toolkit: graph environment, dataset pipeline, "
               "preference rewards, toy policy training, evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  int exit_code = 0;

  // build-dataset
  CommonArgs bd_args;
  long long bd_count = 50, bd_min = 3, bd_max = 10, bd_attempts = 200,
            bd_task_len = 200;
  auto* bd = app.add_subcommand("build-dataset",
                                "sample, validate, annotate and filter flows");
  add_common(bd, &bd_args);
  bd->add_option("--count", bd_count, "flows to sample");
  bd->add_option("--min-len", bd_min, "minimum flow length");
  bd->add_option("--max-len", bd_max, "maximum flow length");
  bd->add_option("--max-attempts", bd_attempts, "walk attempts per flow");
  bd->add_option("--max-task-len", bd_task_len, "task text length cutoff");
  bd->callback([&] {
    exit_code = cmd_build_dataset(*bd, bd_args, bd_count, bd_min, bd_max,
                                  bd_attempts, bd_task_len);
  });

  // extract-subtasks
  CommonArgs es_args;
  std::string es_flows, es_known;
  double es_jaccard = 0.8;
  auto* es = app.add_subcommand("extract-subtasks",
                                "split flows into reach/operate subtasks");
  add_common(es, &es_args);
  es->add_option("--flows", es_flows, "flows JSONL")->required();
  es->add_option("--known-names", es_known,
                 "text file of page names treated as already assigned");
  es->add_option("--jaccard", es_jaccard, "page similarity threshold");
  es->callback([&] {
    exit_code = cmd_extract_subtasks(*es, es_args, es_flows, es_known,
                                     es_jaccard);
  });

  // build-prefs
  CommonArgs bp_args;
  std::string bp_flows, bp_agent = "golden";
  double bp_timeout = 10.0;
  auto* bp = app.add_subcommand(
      "build-prefs", "regenerate flows with an agent and emit DPO pairs");
  add_common(bp, &bp_args);
  bp->add_option("--flows", bp_flows, "golden flows JSONL")->required();
  bp->add_option("--agent", bp_agent,
                 "golden|random|policy:<ckpt>|exec:<cmd>|tcp:<host:port>");
  bp->add_option("--timeout", bp_timeout, "bridge timeout seconds");
  bp->callback([&] {
    exit_code = cmd_build_prefs(*bp, bp_args, bp_flows, bp_agent, bp_timeout);
  });

  // train
  CommonArgs tr_args;
  std::string tr_data, tr_objective = "sft", tr_init;
  long long tr_steps = 100, tr_dim = 4096;
  double tr_lr = 0.5, tr_beta = 0.1;
  auto* tr = app.add_subcommand("train", "toy-scale SFT or DPO training");
  add_common(tr, &tr_args);
  tr->add_option("--data", tr_data, "flows JSONL (sft) or prefs JSONL (dpo)")
      ->required();
  tr->add_option("--objective", tr_objective, "sft or dpo")
      ->check(CLI::IsMember({"sft", "dpo"}));
  tr->add_option("--init", tr_init, "initial checkpoint (optional)");
  tr->add_option("--steps", tr_steps, "gradient steps");
  tr->add_option("--lr", tr_lr, "learning rate");
  tr->add_option("--beta", tr_beta, "DPO temperature");
  tr->add_option("--dim", tr_dim, "feature dimension (power of two)");
  tr->callback([&] {
    exit_code = cmd_train(*tr, tr_args, tr_data, tr_objective, tr_init,
                          tr_steps, tr_lr, tr_beta, tr_dim);
  });

  // eval
  CommonArgs ev_args;
  std::string ev_flows, ev_agent = "golden", ev_iou_mode = "ExpandIntersect";
  long long ev_max_steps = 15;
  bool ev_strict = false;
  double ev_margin = 0.14, ev_timeout = 10.0;
  auto* ev = app.add_subcommand("eval",
                                "run episodes against gold flows and score");
  add_common(ev, &ev_args);
  ev->add_option("--flows", ev_flows, "gold flows JSONL")->required();
  ev->add_option("--agent", ev_agent,
                 "golden|random|policy:<ckpt>|exec:<cmd>|tcp:<host:port>");
  ev->add_option("--max-steps", ev_max_steps, "episode step limit");
  ev->add_flag("--strict", ev_strict, "terminate on unmatched actions");
  ev->add_option("--margin", ev_margin, "golden box expansion margin");
  ev->add_option("--iou-mode", ev_iou_mode, "ExpandIntersect or CenterIn");
  ev->add_option("--timeout", ev_timeout, "bridge timeout seconds");
  ev->callback([&] {
    exit_code = cmd_eval(*ev, ev_args, ev_flows, ev_agent, ev_max_steps,
                         ev_strict, ev_margin, ev_iou_mode, ev_timeout);
  });

  // run-episode
  CommonArgs re_args;
  std::string re_task, re_agent = "random", re_start;
  long long re_max_steps = 15;
  bool re_strict = false;
  double re_timeout = 10.0;
  auto* re = app.add_subcommand("run-episode", "run one episode");
  add_common(re, &re_args);
  re->add_option("--task", re_task, "task instruction")->required();
  re->add_option("--agent", re_agent,
                 "random|policy:<ckpt>|exec:<cmd>|tcp:<host:port>");
  re->add_option("--start", re_start, "start page (default: home)");
  re->add_option("--max-steps", re_max_steps, "episode step limit");
  re->add_flag("--strict", re_strict, "terminate on unmatched actions");
  re->add_option("--timeout", re_timeout, "bridge timeout seconds");
  re->callback([&] {
    exit_code = cmd_run_episode(*re, re_args, re_task, re_agent, re_start,
                                re_max_steps, re_strict, re_timeout);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const guiflow::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const guiflow::AgentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const guiflow::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return exit_code;
}
