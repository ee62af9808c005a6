#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "guiflow/action_space.hpp"
#include "guiflow/bridge.hpp"
#include "guiflow/episode.hpp"
#include "guiflow/errors.hpp"
#include "guiflow/geometry.hpp"
#include "guiflow/io.hpp"
#include "guiflow/metrics.hpp"
#include "guiflow/model.hpp"
#include "guiflow/policy.hpp"
#include "guiflow/reward.hpp"
#include "guiflow/sampler.hpp"
#include "guiflow/subtask.hpp"

namespace py = pybind11;

namespace guiflow {
namespace {

// Lets Python classes subclass Agent and drive run_episode / Environment.
class PyAgent : public Agent {
 public:
  using Agent::Agent;

  Action decide(const std::string& task, const GuiPage& page,
                const std::vector<Action>& action_space,
                const std::vector<Action>& history) override {
    PYBIND11_OVERRIDE_PURE(Action, Agent, decide, task, page, action_space,
                           history);
  }
};

// JSON crosses the boundary as serialized text; the Python package wraps
// these with dict helpers via the stdlib json module.
std::string dump_json(const json& j) { return j.dump(); }
json parse_json(const std::string& s) { return json::parse(s); }

}  // namespace
}  // namespace guiflow

PYBIND11_MODULE(_guiflow, m) {
  using namespace guiflow;

  m.doc() = "Native core of the guiflow toolkit: pages, flows, rewards, "
            "training, episodes and metrics.";
  m.attr("__version__") = "0.1.0";
  m.attr("DEFAULT_SWIPE_FRAC") = kDefaultSwipeFrac;

  // Exception hierarchy. Translators run newest-first, so bases are
  // registered before the subtypes that must win the match.
  auto err = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", err.ptr());
  auto data_err = py::register_exception<DataError>(m, "DataError", err.ptr());
  py::register_exception<NotAlignableError>(m, "NotAlignableError", err.ptr());
  py::register_exception<EpisodeTerminatedError>(m, "EpisodeTerminatedError",
                                                 err.ptr());
  auto agent_err = py::register_exception<AgentError>(m, "AgentError",
                                                      err.ptr());
  py::register_exception<MalformedXmlError>(m, "MalformedXmlError",
                                            data_err.ptr());
  py::register_exception<UnknownPageError>(m, "UnknownPageError",
                                           data_err.ptr());
  py::register_exception<GraphTooSmallError>(m, "GraphTooSmallError",
                                             data_err.ptr());
  py::register_exception<NoGoldenFlowError>(m, "NoGoldenFlowError",
                                            data_err.ptr());
  py::register_exception<AlignmentError>(m, "AlignmentError", data_err.ptr());
  auto not_in_space_err = py::register_exception<ActionNotInSpaceError>(
      m, "ActionNotInSpaceError", data_err.ptr());
  py::register_exception<GoldenNotInSpaceError>(m, "GoldenNotInSpaceError",
                                                not_in_space_err.ptr());
  auto protocol_err = py::register_exception<AgentProtocolError>(
      m, "AgentProtocolError", agent_err.ptr());
  py::register_exception<MalformedResponseError>(m, "MalformedResponseError",
                                                 protocol_err.ptr());
  py::register_exception<TimeoutError>(m, "TimeoutError", agent_err.ptr());
  py::register_exception<TransportClosedError>(m, "TransportClosedError",
                                               agent_err.ptr());

  // Geometry.
  py::class_<Point>(m, "Point")
      .def(py::init<>())
      .def(py::init([](int x, int y) {
             return Point{x, y};
           }),
           py::arg("x"), py::arg("y"))
      .def_readwrite("x", &Point::x)
      .def_readwrite("y", &Point::y)
      .def(py::self == py::self)
      .def("__repr__", [](const Point& p) {
        return "Point(" + std::to_string(p.x) + ", " + std::to_string(p.y) +
               ")";
      });

  py::class_<BoundingBox>(m, "BoundingBox")
      .def(py::init<>())
      .def(py::init([](int x1, int y1, int x2, int y2) {
             return BoundingBox{x1, y1, x2, y2};
           }),
           py::arg("x1"), py::arg("y1"), py::arg("x2"), py::arg("y2"))
      .def_readwrite("x1", &BoundingBox::x1)
      .def_readwrite("y1", &BoundingBox::y1)
      .def_readwrite("x2", &BoundingBox::x2)
      .def_readwrite("y2", &BoundingBox::y2)
      .def(py::self == py::self)
      .def("__repr__",
           [](const BoundingBox& b) { return bbox_to_string(b); });

  py::class_<ScreenSize>(m, "ScreenSize")
      .def(py::init<>())
      .def(py::init([](int width, int height) {
             return ScreenSize{width, height};
           }),
           py::arg("width"), py::arg("height"))
      .def_readwrite("width", &ScreenSize::width)
      .def_readwrite("height", &ScreenSize::height)
      .def(py::self == py::self)
      .def("__repr__", [](const ScreenSize& s) {
        return "ScreenSize(" + std::to_string(s.width) + ", " +
               std::to_string(s.height) + ")";
      });

  m.def("bbox_valid", &bbox_valid, py::arg("box"));
  m.def("bbox_width", &bbox_width, py::arg("box"));
  m.def("bbox_height", &bbox_height, py::arg("box"));
  m.def("bbox_center", &bbox_center, py::arg("box"));
  m.def("bbox_intersects", &bbox_intersects, py::arg("a"), py::arg("b"));
  m.def("bbox_expand", &bbox_expand, py::arg("box"), py::arg("screen"),
        py::arg("frac"));
  m.def("bbox_clamp", &bbox_clamp, py::arg("box"), py::arg("screen"));
  m.def("bbox_to_string", &bbox_to_string, py::arg("box"));

  // Core model.
  py::enum_<ActionKind>(m, "ActionKind")
      .value("Click", ActionKind::Click)
      .value("Scroll", ActionKind::Scroll)
      .value("Input", ActionKind::Input)
      .value("Complete", ActionKind::Complete);

  py::enum_<ScrollDirection>(m, "ScrollDirection")
      .value("Up", ScrollDirection::Up)
      .value("Down", ScrollDirection::Down)
      .value("Left", ScrollDirection::Left)
      .value("Right", ScrollDirection::Right);

  py::class_<Action>(m, "Action")
      .def(py::init<>())
      .def_readwrite("kind", &Action::kind)
      .def_readwrite("element_name", &Action::element_name)
      .def_readwrite("bounds", &Action::bounds)
      .def_readwrite("direction", &Action::direction)
      .def_readwrite("input_text", &Action::input_text)
      .def_readwrite("complete_text", &Action::complete_text)
      .def_static("click", &Action::click, py::arg("name"), py::arg("bounds"))
      .def_static("scroll", &Action::scroll, py::arg("name"),
                  py::arg("bounds"), py::arg("direction"))
      .def_static("input", &Action::input, py::arg("name"), py::arg("bounds"),
                  py::arg("text"))
      .def_static("complete", &Action::complete, py::arg("text") = "")
      .def(py::self == py::self)
      .def("__repr__", [](const Action& a) { return action_signature(a); });

  m.def("same_target", &same_target, py::arg("a"), py::arg("b"));
  m.def("action_signature", &action_signature, py::arg("action"));

  py::class_<Element>(m, "Element")
      .def(py::init<>())
      .def(py::init([](std::string id, std::string name, BoundingBox bounds,
                       bool clickable, bool scrollable, bool inputtable) {
             return Element{std::move(id), std::move(name), bounds, clickable,
                            scrollable, inputtable};
           }),
           py::arg("id"), py::arg("name"), py::arg("bounds"),
           py::arg("clickable") = false, py::arg("scrollable") = false,
           py::arg("inputtable") = false)
      .def_readwrite("id", &Element::id)
      .def_readwrite("name", &Element::name)
      .def_readwrite("bounds", &Element::bounds)
      .def_readwrite("clickable", &Element::clickable)
      .def_readwrite("scrollable", &Element::scrollable)
      .def_readwrite("inputtable", &Element::inputtable);

  py::class_<GuiPage>(m, "GuiPage")
      .def(py::init<>())
      .def(py::init([](std::string page_id, std::string xml,
                       std::optional<std::string> screenshot_ref,
                       ScreenSize screen, std::vector<Element> elements,
                       std::optional<std::string> caption) {
             return GuiPage{std::move(page_id), std::move(xml),
                            std::move(screenshot_ref), screen,
                            std::move(elements), std::move(caption)};
           }),
           py::arg("page_id"), py::arg("xml") = "",
           py::arg("screenshot_ref") = std::nullopt,
           py::arg("screen") = ScreenSize{},
           py::arg("elements") = std::vector<Element>{},
           py::arg("caption") = std::nullopt)
      .def_readwrite("page_id", &GuiPage::page_id)
      .def_readwrite("xml", &GuiPage::xml)
      .def_readwrite("screenshot_ref", &GuiPage::screenshot_ref)
      .def_readwrite("screen", &GuiPage::screen)
      .def_readwrite("elements", &GuiPage::elements)
      .def_readwrite("caption", &GuiPage::caption);

  py::class_<GraphEdge>(m, "GraphEdge")
      .def(py::init<>())
      .def(py::init([](std::string src, Action action, std::string dst) {
             return GraphEdge{std::move(src), std::move(action),
                              std::move(dst)};
           }),
           py::arg("src"), py::arg("action"), py::arg("dst"))
      .def_readwrite("src", &GraphEdge::src)
      .def_readwrite("action", &GraphEdge::action)
      .def_readwrite("dst", &GraphEdge::dst);

  py::class_<GuiGraph>(m, "GuiGraph")
      .def(py::init<>())
      .def("add_page", &GuiGraph::add_page, py::arg("page"))
      .def("add_edge", &GuiGraph::add_edge, py::arg("edge"))
      .def("has_page", &GuiGraph::has_page, py::arg("page_id"))
      .def("page", &GuiGraph::page, py::arg("page_id"))
      .def("pages", &GuiGraph::pages)
      .def("edges", &GuiGraph::edges)
      .def("outgoing", &GuiGraph::outgoing, py::arg("src"))
      .def("home", &GuiGraph::home)
      .def("set_home", &GuiGraph::set_home, py::arg("page_id"));

  py::class_<FlowStep>(m, "FlowStep")
      .def(py::init<>())
      .def(py::init([](std::string page_id, Action action) {
             return FlowStep{std::move(page_id), std::move(action)};
           }),
           py::arg("page_id"), py::arg("action"))
      .def_readwrite("page_id", &FlowStep::page_id)
      .def_readwrite("action", &FlowStep::action);

  py::class_<GuiFlow>(m, "GuiFlow")
      .def(py::init<>())
      .def(py::init([](std::string task, std::vector<FlowStep> steps,
                       std::vector<std::string> step_descriptions,
                       std::string terminal_page) {
             return GuiFlow{std::move(task), std::move(steps),
                            std::move(step_descriptions),
                            std::move(terminal_page)};
           }),
           py::arg("task") = "", py::arg("steps") = std::vector<FlowStep>{},
           py::arg("step_descriptions") = std::vector<std::string>{},
           py::arg("terminal_page") = "")
      .def_readwrite("task", &GuiFlow::task)
      .def_readwrite("steps", &GuiFlow::steps)
      .def_readwrite("step_descriptions", &GuiFlow::step_descriptions)
      .def_readwrite("terminal_page", &GuiFlow::terminal_page);

  m.def("flow_pages", &flow_pages, py::arg("flow"));
  m.def("flow_prefix", &flow_prefix, py::arg("flow"), py::arg("num_steps"));
  m.def("path_signature", &path_signature, py::arg("flow"));
  m.def("flow_actions_signature", &flow_actions_signature, py::arg("flow"));

  py::enum_<SubtaskKind>(m, "SubtaskKind")
      .value("Reach", SubtaskKind::Reach)
      .value("Operate", SubtaskKind::Operate);

  py::class_<SubtaskSpec>(m, "SubtaskSpec")
      .def(py::init<>())
      .def(py::init([](SubtaskKind kind, std::string target_page,
                       std::optional<Action> required_action,
                       std::string task_text, GuiFlow flow) {
             return SubtaskSpec{kind, std::move(target_page),
                                std::move(required_action),
                                std::move(task_text), std::move(flow)};
           }),
           py::arg("kind"), py::arg("target_page"),
           py::arg("required_action") = std::nullopt,
           py::arg("task_text") = "", py::arg("flow") = GuiFlow{})
      .def_readwrite("kind", &SubtaskSpec::kind)
      .def_readwrite("target_page", &SubtaskSpec::target_page)
      .def_readwrite("required_action", &SubtaskSpec::required_action)
      .def_readwrite("task_text", &SubtaskSpec::task_text)
      .def_readwrite("flow", &SubtaskSpec::flow);

  // Action space and gesture alignment.
  py::enum_<GestureKind>(m, "GestureKind")
      .value("Tap", GestureKind::Tap)
      .value("Swipe", GestureKind::Swipe)
      .value("TypeAt", GestureKind::TypeAt);

  py::class_<AlignedGesture>(m, "AlignedGesture")
      .def(py::init<>())
      .def_readwrite("kind", &AlignedGesture::kind)
      .def_readwrite("start", &AlignedGesture::start)
      .def_readwrite("end", &AlignedGesture::end)
      .def_readwrite("text", &AlignedGesture::text)
      .def(py::self == py::self);

  m.def(
      "parse_page_xml",
      [](const std::string& xml, const ScreenSize& screen) {
        std::vector<std::string> warnings;
        std::vector<Element> elements = parse_page_xml(xml, screen, &warnings);
        return py::make_tuple(std::move(elements), std::move(warnings));
      },
      py::arg("xml"), py::arg("screen"),
      "Returns (elements, warnings) parsed from a UIAutomator-style dump.");
  m.def("enumerate_action_space", &enumerate_action_space, py::arg("page"));
  m.def("action_space_size", &action_space_size, py::arg("page"));
  m.def("align_action", &align_action, py::arg("action"), py::arg("screen"),
        py::arg("swipe_frac") = kDefaultSwipeFrac);
  m.def("action_in_space", &action_in_space, py::arg("action"),
        py::arg("page"));

  // Flow sampling.
  py::class_<SamplerConfig>(m, "SamplerConfig")
      .def(py::init<>())
      .def_readwrite("min_len", &SamplerConfig::min_len)
      .def_readwrite("max_len", &SamplerConfig::max_len)
      .def_readwrite("seed", &SamplerConfig::seed)
      .def_readwrite("max_attempts", &SamplerConfig::max_attempts)
      .def_readwrite("max_task_len", &SamplerConfig::max_task_len);

  m.def("validate_config", &validate_config, py::arg("config"));

  py::class_<DedupRegistry>(m, "DedupRegistry")
      .def(py::init<>())
      .def_readwrite("paths", &DedupRegistry::paths)
      .def_readwrite("tasks", &DedupRegistry::tasks)
      .def_readwrite("actions", &DedupRegistry::actions);

  py::class_<PageNameRegistry>(m, "PageNameRegistry")
      .def(py::init<>())
      .def("has_name", &PageNameRegistry::has_name, py::arg("name"))
      .def(
          "page_for",
          [](const PageNameRegistry& r,
             const std::string& name) -> std::optional<std::string> {
            const std::string* page = r.page_for(name);
            if (page == nullptr) return std::nullopt;
            return *page;
          },
          py::arg("name"))
      .def("preload", &PageNameRegistry::preload, py::arg("name"))
      .def("assign", &PageNameRegistry::assign, py::arg("name"),
           py::arg("page_id"))
      .def("usage_count", &PageNameRegistry::usage_count, py::arg("name"));

  py::class_<ValidationResult>(m, "ValidationResult")
      .def(py::init<>())
      .def_readwrite("ok", &ValidationResult::ok)
      .def_readwrite("violations", &ValidationResult::violations);

  m.def("validate_flow", &validate_flow, py::arg("flow"), py::arg("graph"),
        py::arg("registry"));
  m.def("page_label", &page_label, py::arg("page"));
  m.def("describe_step", &describe_step, py::arg("graph"), py::arg("step"));
  m.def(
      "attach_task_text",
      [](GuiFlow flow, const GuiGraph& g) {
        const TemplateTaskTextGenerator gen;
        attach_task_text(&flow, g, gen);
        return flow;
      },
      py::arg("flow"), py::arg("graph"),
      "Returns a copy of the flow with template task text attached.");
  m.def("filter_tasks", &filter_tasks, py::arg("flows"), py::arg("registry"),
        py::arg("max_task_len"));
  m.def("name_page", &name_page, py::arg("page"), py::arg("incoming"),
        py::arg("step_desc"), py::arg("registry"));

  py::class_<FlowSampler>(m, "FlowSampler")
      .def(py::init<const GuiGraph&, SamplerConfig>(), py::arg("graph"),
           py::arg("config"), py::keep_alive<1, 2>())
      .def("sample", &FlowSampler::sample, py::arg("n"))
      .def("registry", &FlowSampler::registry,
           py::return_value_policy::reference_internal);

  m.def(
      "sample_dataset",
      [](const GuiGraph& g, std::size_t count, SamplerConfig cfg) {
        FlowSampler sampler(g, cfg);
        std::vector<GuiFlow> flows = sampler.sample(count);
        const TemplateTaskTextGenerator gen;
        for (GuiFlow& f : flows) attach_task_text(&f, g, gen);
        return filter_tasks(std::move(flows), sampler.registry(),
                            cfg.max_task_len);
      },
      py::arg("graph"), py::arg("count"), py::arg("config") = SamplerConfig{},
      "Samples, annotates and filters flows in one call, like the "
      "build-dataset command.");

  // Subtask extraction.
  py::class_<SimilarityConfig>(m, "SimilarityConfig")
      .def(py::init<>())
      .def_readwrite("jaccard_threshold", &SimilarityConfig::jaccard_threshold);

  py::class_<SubtaskExtractorConfig>(m, "SubtaskExtractorConfig")
      .def(py::init<>())
      .def_readwrite("seed", &SubtaskExtractorConfig::seed)
      .def_readwrite("similarity", &SubtaskExtractorConfig::similarity)
      .def_readwrite("templates", &SubtaskExtractorConfig::templates)
      .def_readwrite("known_names", &SubtaskExtractorConfig::known_names);

  py::enum_<TemplateClass>(m, "TemplateClass")
      .value("Page", TemplateClass::Page)
      .value("Interface", TemplateClass::Interface)
      .value("Image", TemplateClass::Image)
      .value("Neutral", TemplateClass::Neutral);

  m.def("page_similarity", &page_similarity, py::arg("a"), py::arg("b"));
  m.def("default_reach_templates", &default_reach_templates);
  m.def("classify_template", &classify_template, py::arg("template"));
  m.def("instantiate_template", &instantiate_template, py::arg("template"),
        py::arg("page_name"));

  py::class_<SubtaskExtractor>(m, "SubtaskExtractor")
      .def(py::init<const GuiGraph&, SubtaskExtractorConfig>(),
           py::arg("graph"), py::arg("config"), py::keep_alive<1, 2>())
      .def("extract_reaching", &SubtaskExtractor::extract_reaching,
           py::arg("flow"))
      .def("extract_operation", &SubtaskExtractor::extract_operation,
           py::arg("flow"))
      .def("extract_all", &SubtaskExtractor::extract_all, py::arg("flow"))
      .def("registry", &SubtaskExtractor::registry,
           py::return_value_policy::reference_internal);

  // Reward engine and preference pairs. The enum is arithmetic so levels
  // compare by rank straight from Python.
  py::enum_<RewardLevel>(m, "RewardLevel", py::arithmetic())
      .value("Invalid", RewardLevel::Invalid)
      .value("Incomplete", RewardLevel::Incomplete)
      .value("Longer", RewardLevel::Longer)
      .value("Golden", RewardLevel::Golden);

  py::class_<CompletionSpec>(m, "CompletionSpec")
      .def(py::init<>())
      .def(py::init([](std::vector<SubtaskSpec> obligations,
                       int max_search_depth) {
             return CompletionSpec{std::move(obligations), max_search_depth};
           }),
           py::arg("obligations"), py::arg("max_search_depth") = 0)
      .def_readwrite("obligations", &CompletionSpec::obligations)
      .def_readwrite("max_search_depth", &CompletionSpec::max_search_depth);

  m.def("spec_from_flow", &spec_from_flow, py::arg("flow"));
  m.def("completion_spec_for", &completion_spec_for, py::arg("subtask"));

  py::class_<RewardScorer>(m, "RewardScorer")
      .def(py::init<const GuiGraph&, CompletionSpec>(), py::arg("graph"),
           py::arg("spec"), py::keep_alive<1, 2>())
      .def("spec", &RewardScorer::spec)
      .def("obligation_count", &RewardScorer::obligation_count)
      .def("progress_after", &RewardScorer::progress_after, py::arg("history"))
      .def("initial_progress", &RewardScorer::initial_progress,
           py::arg("start"))
      .def("advance", &RewardScorer::advance, py::arg("k"),
           py::arg("src_page"), py::arg("executed"), py::arg("dst_page"))
      .def("golden_length", &RewardScorer::golden_length, py::arg("start"))
      .def("classify", &RewardScorer::classify, py::arg("page_id"),
           py::arg("history"), py::arg("action"));

  m.def("golden_length", &golden_length, py::arg("graph"), py::arg("start"),
        py::arg("spec"));
  m.def("classify_action", &classify_action, py::arg("graph"),
        py::arg("page_id"), py::arg("history"), py::arg("action"),
        py::arg("spec"));

  py::enum_<PairSource>(m, "PairSource")
      .value("AgentGenerated", PairSource::AgentGenerated)
      .value("SpaceSampled", PairSource::SpaceSampled);

  py::class_<PreferencePair>(m, "PreferencePair")
      .def(py::init<>())
      .def_readwrite("task", &PreferencePair::task)
      .def_readwrite("page_id", &PreferencePair::page_id)
      .def_readwrite("chosen", &PreferencePair::chosen)
      .def_readwrite("rejected", &PreferencePair::rejected)
      .def_readwrite("chosen_level", &PreferencePair::chosen_level)
      .def_readwrite("rejected_level", &PreferencePair::rejected_level)
      .def_readwrite("source", &PreferencePair::source)
      .def_readwrite("golden_length", &PreferencePair::golden_length);

  py::class_<RegeneratedFlow>(m, "RegeneratedFlow")
      .def(py::init<>())
      .def(py::init([](GuiFlow golden,
                       std::vector<std::optional<Action>> agent_actions) {
             return RegeneratedFlow{std::move(golden),
                                    std::move(agent_actions)};
           }),
           py::arg("golden"),
           py::arg("agent_actions") = std::vector<std::optional<Action>>{})
      .def_readwrite("golden", &RegeneratedFlow::golden)
      .def_readwrite("agent_actions", &RegeneratedFlow::agent_actions);

  m.def(
      "build_preference_pairs",
      [](const GuiGraph& g, const std::vector<RegeneratedFlow>& flows,
         py::object spec_fn, std::uint64_t seed) {
        std::function<CompletionSpec(const GuiFlow&)> fn;
        if (spec_fn.is_none()) {
          fn = [](const GuiFlow& f) { return spec_from_flow(f); };
        } else {
          fn = [spec_fn](const GuiFlow& f) {
            return spec_fn(f).cast<CompletionSpec>();
          };
        }
        return build_preference_pairs(g, flows, fn, seed);
      },
      py::arg("graph"), py::arg("flows"), py::arg("spec_fn") = py::none(),
      py::arg("seed") = 0,
      "spec_fn maps a golden flow to its CompletionSpec; None means "
      "spec_from_flow.");

  // Policies and training.
  py::class_<FeatureHasher>(m, "FeatureHasher")
      .def(py::init<>())
      .def_readwrite("dim", &FeatureHasher::dim)
      .def_readwrite("seed", &FeatureHasher::seed)
      .def("index", &FeatureHasher::index, py::arg("token"));

  m.def("validate_hasher", &validate_hasher, py::arg("hasher"));
  m.def("featurize", &featurize, py::arg("hasher"), py::arg("task"),
        py::arg("page"), py::arg("history"), py::arg("action"));

  py::class_<LinearPolicy>(m, "LinearPolicy")
      .def(py::init<FeatureHasher, double>(),
           py::arg("hasher") = FeatureHasher{}, py::arg("beta") = 0.1)
      .def_readwrite("hasher", &LinearPolicy::hasher)
      .def_readwrite("weights", &LinearPolicy::weights)
      .def_readwrite("beta", &LinearPolicy::beta);

  m.def("score", &score, py::arg("policy"), py::arg("phi"));

  py::class_<ScoredAction>(m, "ScoredAction")
      .def(py::init<>())
      .def_readwrite("action", &ScoredAction::action)
      .def_readwrite("logprob", &ScoredAction::logprob);

  m.def("action_logprobs", &action_logprobs, py::arg("policy"),
        py::arg("task"), py::arg("page"), py::arg("history"));
  m.def("candidate_actions", &candidate_actions, py::arg("page"),
        py::arg("queries"));

  py::class_<SftExample>(m, "SftExample")
      .def(py::init<>())
      .def(py::init([](std::string task, std::string page_id,
                       std::vector<Action> history, Action golden) {
             return SftExample{std::move(task), std::move(page_id),
                               std::move(history), std::move(golden)};
           }),
           py::arg("task"), py::arg("page_id"),
           py::arg("history") = std::vector<Action>{}, py::arg("golden"))
      .def_readwrite("task", &SftExample::task)
      .def_readwrite("page_id", &SftExample::page_id)
      .def_readwrite("history", &SftExample::history)
      .def_readwrite("golden", &SftExample::golden);

  py::class_<DpoExample>(m, "DpoExample")
      .def(py::init<>())
      .def(py::init([](std::string task, std::string page_id, Action chosen,
                       Action rejected) {
             return DpoExample{std::move(task), std::move(page_id),
                               std::move(chosen), std::move(rejected)};
           }),
           py::arg("task"), py::arg("page_id"), py::arg("chosen"),
           py::arg("rejected"))
      .def_readwrite("task", &DpoExample::task)
      .def_readwrite("page_id", &DpoExample::page_id)
      .def_readwrite("chosen", &DpoExample::chosen)
      .def_readwrite("rejected", &DpoExample::rejected);

  m.def("sft_examples_from_flow", &sft_examples_from_flow, py::arg("flow"));
  m.def("sft_loss_and_grad", &sft_loss_and_grad, py::arg("policy"),
        py::arg("graph"), py::arg("batch"));
  m.def("dpo_loss_and_grad", &dpo_loss_and_grad, py::arg("policy"),
        py::arg("ref"), py::arg("graph"), py::arg("batch"));
  m.def("dpo_margin", &dpo_margin, py::arg("policy"), py::arg("ref"),
        py::arg("graph"), py::arg("example"));

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("steps", &TrainConfig::steps)
      .def_readwrite("lr", &TrainConfig::lr)
      .def_readwrite("seed", &TrainConfig::seed);

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("policy", &TrainResult::policy)
      .def_readonly("loss_curve", &TrainResult::loss_curve);

  m.def("train_sft", &train_sft, py::arg("init"), py::arg("graph"),
        py::arg("data"), py::arg("config"));
  m.def("train_dpo", &train_dpo, py::arg("init"), py::arg("graph"),
        py::arg("data"), py::arg("config"));
  m.def("save_policy", &save_policy, py::arg("policy"), py::arg("path"));
  m.def("load_policy", &load_policy, py::arg("path"));

  // Episodes and agents.
  py::enum_<InvalidActionPolicy>(m, "InvalidActionPolicy")
      .value("Strict", InvalidActionPolicy::Strict)
      .value("Lenient", InvalidActionPolicy::Lenient);

  py::enum_<StepOutcome>(m, "StepOutcome")
      .value("Executed", StepOutcome::Executed)
      .value("InvalidStay", StepOutcome::InvalidStay);

  py::enum_<TerminationReason>(m, "TerminationReason")
      .value("Complete", TerminationReason::Complete)
      .value("StepLimit", TerminationReason::StepLimit)
      .value("StrictFailure", TerminationReason::StrictFailure);

  py::class_<EpisodeConfig>(m, "EpisodeConfig")
      .def(py::init<>())
      .def_readwrite("max_steps", &EpisodeConfig::max_steps)
      .def_readwrite("invalid_action_policy",
                     &EpisodeConfig::invalid_action_policy);

  py::class_<VisitedStep>(m, "VisitedStep")
      .def(py::init<>())
      .def_readwrite("page_id", &VisitedStep::page_id)
      .def_readwrite("action", &VisitedStep::action)
      .def_readwrite("outcome", &VisitedStep::outcome);

  py::class_<EpisodeTrace>(m, "EpisodeTrace")
      .def(py::init<>())
      .def_readwrite("task", &EpisodeTrace::task)
      .def_readwrite("visited", &EpisodeTrace::visited)
      .def_readwrite("terminated_by", &EpisodeTrace::terminated_by);

  m.def(
      "match_edge",
      [](const GuiGraph& g, const std::string& page_id,
         const Action& a) -> std::optional<GraphEdge> {
        const GraphEdge* e = match_edge(g, page_id, a);
        if (e == nullptr) return std::nullopt;
        return *e;
      },
      py::arg("graph"), py::arg("page_id"), py::arg("action"),
      "First outgoing edge the environment would execute, or None.");

  py::class_<Environment>(m, "Environment")
      .def(py::init<const GuiGraph&, std::string, const std::string&,
                    EpisodeConfig>(),
           py::arg("graph"), py::arg("task"), py::arg("start") = "",
           py::arg("config") = EpisodeConfig{}, py::keep_alive<1, 2>())
      .def("current_page_id", &Environment::current_page_id)
      .def("current_page", &Environment::current_page)
      .def("terminated", &Environment::terminated)
      .def("trace", &Environment::trace)
      .def("attempted_actions", &Environment::attempted_actions)
      .def("step", &Environment::step, py::arg("action"));

  py::class_<Agent, PyAgent>(m, "Agent")
      .def(py::init<>())
      .def("decide", &Agent::decide, py::arg("task"), py::arg("page"),
           py::arg("action_space"), py::arg("history"));

  py::class_<GoldenReplayAgent, Agent>(m, "GoldenReplayAgent")
      .def(py::init<GuiFlow>(), py::arg("flow"));

  py::class_<RandomAgent, Agent>(m, "RandomAgent")
      .def(py::init<std::uint64_t>(), py::arg("seed"));

  py::class_<PolicyAgent, Agent>(m, "PolicyAgent")
      .def(py::init<LinearPolicy>(), py::arg("policy"));

  m.def("run_episode", &run_episode, py::arg("graph"), py::arg("agent"),
        py::arg("task"), py::arg("config") = EpisodeConfig{},
        py::arg("start") = "");

  // External-agent bridge.
  py::class_<BridgeConfig>(m, "BridgeConfig")
      .def(py::init<>())
      .def_readwrite("timeout_seconds", &BridgeConfig::timeout_seconds);

  py::class_<BridgeAgent, Agent>(m, "BridgeAgent");

  m.def(
      "process_agent",
      [](const std::vector<std::string>& argv, double timeout_seconds) {
        BridgeConfig bc;
        bc.timeout_seconds = timeout_seconds;
        return std::make_unique<BridgeAgent>(
            std::make_unique<ProcessTransport>(argv), bc);
      },
      py::arg("argv"), py::arg("timeout_seconds") = 10.0,
      "Bridge to a child process speaking the line protocol on its standard "
      "streams.");
  m.def(
      "tcp_agent",
      [](const std::string& host, int port, double timeout_seconds) {
        BridgeConfig bc;
        bc.timeout_seconds = timeout_seconds;
        return std::make_unique<BridgeAgent>(
            std::make_unique<TcpTransport>(host, port), bc);
      },
      py::arg("host"), py::arg("port"), py::arg("timeout_seconds") = 10.0,
      "Bridge to an agent server over TCP.");

  m.def("bridge_request_line", &bridge_request_line, py::arg("task"),
        py::arg("step_index"), py::arg("page"), py::arg("action_space"),
        py::arg("history"));
  m.def("bridge_parse_response", &bridge_parse_response, py::arg("line"));

  // Evaluation metrics.
  py::enum_<IouMode>(m, "IouMode")
      .value("ExpandIntersect", IouMode::ExpandIntersect)
      .value("CenterIn", IouMode::CenterIn);

  py::class_<JudgeConfig>(m, "JudgeConfig")
      .def(py::init<>())
      .def_readwrite("margin", &JudgeConfig::margin)
      .def_readwrite("iou_mode", &JudgeConfig::iou_mode)
      .def_readwrite("step_cap", &JudgeConfig::step_cap);

  m.def("judge_iou", &judge_iou, py::arg("pred"), py::arg("gold"),
        py::arg("screen"), py::arg("config") = JudgeConfig{});
  m.def("token_f1", &token_f1, py::arg("pred"), py::arg("gold"));
  m.def("judge_text", &judge_text, py::arg("pred"), py::arg("gold"));

  py::class_<StepJudgment>(m, "StepJudgment")
      .def(py::init<>())
      .def_readwrite("iou_ok", &StepJudgment::iou_ok)
      .def_readwrite("text_ok", &StepJudgment::text_ok);

  py::class_<FlowScore>(m, "FlowScore")
      .def(py::init<>())
      .def_readwrite("steps", &FlowScore::steps)
      .def_readwrite("task_iou", &FlowScore::task_iou)
      .def_readwrite("task_text", &FlowScore::task_text)
      .def_readwrite("success", &FlowScore::success);

  m.def("score_flow", &score_flow, py::arg("pred"), py::arg("gold"),
        py::arg("spec"), py::arg("graph"), py::arg("config") = JudgeConfig{});

  py::class_<MetricReport>(m, "MetricReport")
      .def(py::init<>())
      .def_readwrite("gold_steps", &MetricReport::gold_steps)
      .def_readwrite("iou_ok_steps", &MetricReport::iou_ok_steps)
      .def_readwrite("text_ok_steps", &MetricReport::text_ok_steps)
      .def_readwrite("flows", &MetricReport::flows)
      .def_readwrite("task_iou_ok", &MetricReport::task_iou_ok)
      .def_readwrite("task_text_ok", &MetricReport::task_text_ok)
      .def_readwrite("success_ok", &MetricReport::success_ok)
      .def_readwrite("step_iou_acc", &MetricReport::step_iou_acc)
      .def_readwrite("step_text_acc", &MetricReport::step_text_acc)
      .def_readwrite("task_iou_acc", &MetricReport::task_iou_acc)
      .def_readwrite("task_text_acc", &MetricReport::task_text_acc)
      .def_readwrite("task_success_rate", &MetricReport::task_success_rate)
      .def_readwrite("margin", &MetricReport::margin)
      .def_readwrite("iou_mode", &MetricReport::iou_mode)
      .def_readwrite("step_cap", &MetricReport::step_cap);

  m.def("score_run", &score_run, py::arg("preds"), py::arg("golds"),
        py::arg("specs"), py::arg("graph"), py::arg("config") = JudgeConfig{});
  m.def("flow_as_trace", &flow_as_trace, py::arg("flow"));
  m.def("report_table", &report_table, py::arg("report"));

  // Serialization. JSON documents cross as text; the guiflow package adds
  // dict-level helpers on top.
  m.def("action_to_json", [](const Action& a) { return dump_json(action_to_json(a)); },
        py::arg("action"));
  m.def("action_from_json",
        [](const std::string& s) { return action_from_json(parse_json(s)); },
        py::arg("text"));
  m.def("flow_to_json", [](const GuiFlow& f) { return dump_json(flow_to_json(f)); },
        py::arg("flow"));
  m.def("flow_from_json",
        [](const std::string& s) { return flow_from_json(parse_json(s)); },
        py::arg("text"));
  m.def("subtask_to_json",
        [](const SubtaskSpec& s) { return dump_json(subtask_to_json(s)); },
        py::arg("subtask"));
  m.def("subtask_from_json",
        [](const std::string& s) { return subtask_from_json(parse_json(s)); },
        py::arg("text"));
  m.def("pair_to_json", [](const PreferencePair& p) { return dump_json(pair_to_json(p)); },
        py::arg("pair"));
  m.def("pair_from_json",
        [](const std::string& s) { return pair_from_json(parse_json(s)); },
        py::arg("text"));
  m.def("trace_to_json", [](const EpisodeTrace& t) { return dump_json(trace_to_json(t)); },
        py::arg("trace"));
  m.def("trace_from_json",
        [](const std::string& s) { return trace_from_json(parse_json(s)); },
        py::arg("text"));
  m.def("report_to_json", [](const MetricReport& r) { return dump_json(report_to_json(r)); },
        py::arg("report"));
  m.def("report_from_json",
        [](const std::string& s) { return report_from_json(parse_json(s)); },
        py::arg("text"));
  m.def("graph_to_json", [](const GuiGraph& g) { return dump_json(graph_to_json(g)); },
        py::arg("graph"));
  m.def("graph_from_json",
        [](const std::string& s) { return graph_from_json(parse_json(s)); },
        py::arg("text"));
  m.def("policy_to_json", [](const LinearPolicy& p) { return dump_json(policy_to_json(p)); },
        py::arg("policy"));
  m.def("policy_from_json",
        [](const std::string& s) { return policy_from_json(parse_json(s)); },
        py::arg("text"));

  m.def("load_graph", &load_graph, py::arg("path"));
  m.def("save_graph", &save_graph, py::arg("path"), py::arg("graph"));
  m.def("sha256_hex", &sha256_hex, py::arg("data"));
  m.def("sha256_file", &sha256_file, py::arg("path"));

  // Level comparisons read naturally in Python when the enum is orderable.
  m.def(
      "reward_level_rank",
      [](RewardLevel level) { return static_cast<int>(level); },
      py::arg("level"), "Numeric rank of a reward level (higher is better).");
}
