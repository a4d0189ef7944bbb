#pragma once

#include <compare>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtlagent/plan/plan.hpp"

namespace rtlagent::tcrg {

/// What the extraction agent must emit: the circuit's signals, state
/// transitions, and stimulus/response examples pulled out of the problem
/// statement. Transitions and examples carry their signal references
/// explicitly because their prose often paraphrases signal names.
struct SignalInfo {
  std::string name;
  std::string description;
};

struct TransitionInfo {
  std::string label;
  std::string description;
  std::vector<std::string> referenced_signals;
};

struct ExampleInfo {
  std::string description;
  std::vector<std::string> referenced_signals;
};

struct ExtractionDoc {
  std::vector<SignalInfo> signals;
  std::vector<TransitionInfo> transitions;
  std::vector<ExampleInfo> examples;
};

struct DocFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GraphFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DanglingReference : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnknownNode : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotATaskNode : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// JSON schema: {"signals": [{name, description}], "transitions": [{label,
/// description, referenced_signals}], "examples": [{description,
/// referenced_signals}]}. Missing sections read as empty. Signal names must
/// be unique; referenced_signals must name listed signals
/// (DanglingReference otherwise).
ExtractionDoc parse_extraction(const std::string& json_text);
std::string to_json(const ExtractionDoc& doc);

enum class NodeKind { Task, Signal, Transition, Example };
enum class Rel { Implements, SignalTransition, Examples };

struct TcrgNode {
  NodeKind kind = NodeKind::Task;
  std::string text;

  bool operator==(const TcrgNode&) const = default;
};

struct TcrgEdge {
  std::string from;
  std::string to;
  Rel rel = Rel::Implements;
  auto operator<=>(const TcrgEdge&) const = default;
};

/// Node ids are derived from content, not list position: "task:<id>",
/// "sig:<name>", and for transitions/examples a hash of their text — so
/// permuting the extraction document yields the identical graph, and two
/// entries with identical text merge into one node.
struct Tcrg {
  std::map<std::string, TcrgNode> nodes;
  std::set<TcrgEdge> edges;

  bool operator==(const Tcrg&) const = default;
};

/// One node per sub-task / signal / transition / example. IMPLEMENTS edges
/// Task→Signal wherever the signal's name appears as a whole token in the
/// task description (case-sensitive); SIGNALTRANSITION / EXAMPLES edges
/// from each referenced signal.
Tcrg build_graph(const plan::TaskPlan& plan, const ExtractionDoc& doc);

/// JSON schema: {"nodes": [{id, kind, text}], "edges": [{from, to, rel}]}
/// with kind in {task, signal, transition, example} and rel in
/// {IMPLEMENTS, SIGNALTRANSITION, EXAMPLES}. Load validates id uniqueness,
/// edge endpoints, and the kind pairing of every relation.
Tcrg parse_tcrg(const std::string& json_text);
std::string to_json(const Tcrg& graph);

struct HopItem {
  std::string id;
  std::string text;
  int hop = 0;

  bool operator==(const HopItem&) const = default;
};

struct RetrievalResult {
  std::string task_id;
  int k = 0;
  std::vector<HopItem> signals;
  std::vector<HopItem> transitions;
  std::vector<HopItem> examples;
};

/// Breadth-first from the task node along edge direction, depth ≤ k.
/// Buckets are sorted by (hop, id); the task node itself is not returned.
RetrievalResult khop(const Tcrg& graph, const std::string& task_id, int k);

/// Plain-text block for pasting into a sub-task's context: one
/// "signals:/transitions:/examples:" section per nonempty bucket.
std::string render_context(const RetrievalResult& result);

}  // namespace rtlagent::tcrg
