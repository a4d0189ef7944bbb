#include "rtlagent/tcrg/tcrg.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>

#include <json.hpp>

namespace rtlagent::tcrg {

using nlohmann::json;

namespace {

std::string fnv1a_hex(const std::string& s)
{
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool ident_char(char c)
{
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
         c == '$';
}

// Whole-token, case-sensitive: `w` matches in "the output w." but not in
// "word" or "w_next".
bool contains_whole_token(const std::string& text, const std::string& name)
{
  if (name.empty())
    return false;
  std::size_t pos = 0;
  while ((pos = text.find(name, pos)) != std::string::npos) {
    const bool left_ok = pos == 0 || !ident_char(text[pos - 1]);
    const std::size_t end = pos + name.size();
    const bool right_ok = end == text.size() || !ident_char(text[end]);
    if (left_ok && right_ok)
      return true;
    ++pos;
  }
  return false;
}

void validate(const ExtractionDoc& doc)
{
  std::set<std::string> names;
  for (const auto& s : doc.signals) {
    if (s.name.empty())
      throw DocFormatError("signal with empty name");
    if (!names.insert(s.name).second)
      throw DocFormatError("duplicate signal name '" + s.name + "'");
  }
  auto check_refs = [&](const std::vector<std::string>& refs, const std::string& owner) {
    for (const auto& r : refs)
      if (!names.count(r))
        throw DanglingReference(owner + " references unlisted signal '" + r + "'");
  };
  for (const auto& t : doc.transitions)
    check_refs(t.referenced_signals, "transition '" + t.label + "'");
  for (const auto& e : doc.examples)
    check_refs(e.referenced_signals, "example");
}

std::vector<std::string> string_list(const json& arr, const char* what)
{
  if (!arr.is_array())
    throw DocFormatError(std::string(what) + " must be an array");
  std::vector<std::string> out;
  for (const auto& v : arr) {
    if (!v.is_string())
      throw DocFormatError(std::string(what) + " entries must be strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::string kind_name(NodeKind k)
{
  switch (k) {
    case NodeKind::Task: return "task";
    case NodeKind::Signal: return "signal";
    case NodeKind::Transition: return "transition";
    case NodeKind::Example: return "example";
  }
  return "?";
}

std::string rel_name(Rel r)
{
  switch (r) {
    case Rel::Implements: return "IMPLEMENTS";
    case Rel::SignalTransition: return "SIGNALTRANSITION";
    case Rel::Examples: return "EXAMPLES";
  }
  return "?";
}

}  // namespace

ExtractionDoc parse_extraction(const std::string& json_text)
{
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw DocFormatError(std::string("extraction document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object())
    throw DocFormatError("extraction document must be a JSON object");

  ExtractionDoc out;
  for (const auto& item : doc.value("signals", json::array())) {
    if (!item.is_object() || !item.contains("name") || !item.at("name").is_string())
      throw DocFormatError("each signal needs a string 'name'");
    out.signals.push_back({item.at("name").get<std::string>(),
                           item.value("description", std::string())});
  }
  for (const auto& item : doc.value("transitions", json::array())) {
    if (!item.is_object())
      throw DocFormatError("each transition must be an object");
    TransitionInfo t;
    t.label = item.value("label", std::string());
    t.description = item.value("description", std::string());
    if (item.contains("referenced_signals"))
      t.referenced_signals = string_list(item.at("referenced_signals"), "referenced_signals");
    out.transitions.push_back(std::move(t));
  }
  for (const auto& item : doc.value("examples", json::array())) {
    if (!item.is_object())
      throw DocFormatError("each example must be an object");
    ExampleInfo e;
    e.description = item.value("description", std::string());
    if (item.contains("referenced_signals"))
      e.referenced_signals = string_list(item.at("referenced_signals"), "referenced_signals");
    out.examples.push_back(std::move(e));
  }
  validate(out);
  return out;
}

std::string to_json(const ExtractionDoc& doc)
{
  json out;
  out["signals"] = json::array();
  for (const auto& s : doc.signals)
    out["signals"].push_back({{"name", s.name}, {"description", s.description}});
  out["transitions"] = json::array();
  for (const auto& t : doc.transitions)
    out["transitions"].push_back({{"label", t.label},
                                  {"description", t.description},
                                  {"referenced_signals", t.referenced_signals}});
  out["examples"] = json::array();
  for (const auto& e : doc.examples)
    out["examples"].push_back(
        {{"description", e.description}, {"referenced_signals", e.referenced_signals}});
  return out.dump(2);
}

Tcrg build_graph(const plan::TaskPlan& plan, const ExtractionDoc& doc)
{
  validate(doc);
  Tcrg g;
  for (const auto& t : plan.subtasks)
    g.nodes["task:" + t.id] = {NodeKind::Task, t.description};
  for (const auto& s : doc.signals) {
    std::string text = s.description.empty() ? s.name : s.name + ": " + s.description;
    g.nodes["sig:" + s.name] = {NodeKind::Signal, std::move(text)};
  }
  for (const auto& t : doc.transitions) {
    std::string text = t.label.empty() ? t.description : t.label + ": " + t.description;
    const std::string id = "tr:" + fnv1a_hex(t.label + "|" + t.description);
    g.nodes[id] = {NodeKind::Transition, std::move(text)};
    for (const auto& s : t.referenced_signals)
      g.edges.insert({"sig:" + s, id, Rel::SignalTransition});
  }
  for (const auto& e : doc.examples) {
    const std::string id = "ex:" + fnv1a_hex(e.description);
    g.nodes[id] = {NodeKind::Example, e.description};
    for (const auto& s : e.referenced_signals)
      g.edges.insert({"sig:" + s, id, Rel::Examples});
  }
  for (const auto& t : plan.subtasks)
    for (const auto& s : doc.signals)
      if (contains_whole_token(t.description, s.name))
        g.edges.insert({"task:" + t.id, "sig:" + s.name, Rel::Implements});
  return g;
}

Tcrg parse_tcrg(const std::string& json_text)
{
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw GraphFormatError(std::string("graph is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("edges"))
    throw GraphFormatError("graph must be an object with 'nodes' and 'edges'");

  Tcrg g;
  for (const auto& item : doc.at("nodes")) {
    if (!item.is_object() || !item.contains("id") || !item.at("id").is_string())
      throw GraphFormatError("each node needs a string 'id'");
    const auto id = item.at("id").get<std::string>();
    if (g.nodes.count(id))
      throw GraphFormatError("duplicate node id '" + id + "'");
    const auto kind = item.value("kind", std::string());
    TcrgNode node;
    if (kind == "task")
      node.kind = NodeKind::Task;
    else if (kind == "signal")
      node.kind = NodeKind::Signal;
    else if (kind == "transition")
      node.kind = NodeKind::Transition;
    else if (kind == "example")
      node.kind = NodeKind::Example;
    else
      throw GraphFormatError("node '" + id + "' has unknown kind '" + kind + "'");
    node.text = item.value("text", std::string());
    g.nodes[id] = std::move(node);
  }
  for (const auto& item : doc.at("edges")) {
    if (!item.is_object())
      throw GraphFormatError("each edge must be an object");
    TcrgEdge e;
    e.from = item.value("from", std::string());
    e.to = item.value("to", std::string());
    const auto rel = item.value("rel", std::string());
    if (rel == "IMPLEMENTS")
      e.rel = Rel::Implements;
    else if (rel == "SIGNALTRANSITION")
      e.rel = Rel::SignalTransition;
    else if (rel == "EXAMPLES")
      e.rel = Rel::Examples;
    else
      throw GraphFormatError("edge has unknown rel '" + rel + "'");
    const auto from = g.nodes.find(e.from);
    const auto to = g.nodes.find(e.to);
    if (from == g.nodes.end() || to == g.nodes.end())
      throw GraphFormatError("edge endpoint missing: " + e.from + " -> " + e.to);
    const NodeKind want_from = e.rel == Rel::Implements ? NodeKind::Task : NodeKind::Signal;
    const NodeKind want_to = e.rel == Rel::Implements      ? NodeKind::Signal
                             : e.rel == Rel::SignalTransition ? NodeKind::Transition
                                                              : NodeKind::Example;
    if (from->second.kind != want_from || to->second.kind != want_to)
      throw GraphFormatError(rel + " edge must connect " + kind_name(want_from) + " -> " +
                             kind_name(want_to) + ": " + e.from + " -> " + e.to);
    g.edges.insert(e);
  }
  return g;
}

std::string to_json(const Tcrg& graph)
{
  json out;
  out["nodes"] = json::array();
  for (const auto& [id, node] : graph.nodes)
    out["nodes"].push_back({{"id", id}, {"kind", kind_name(node.kind)}, {"text", node.text}});
  out["edges"] = json::array();
  for (const auto& e : graph.edges)
    out["edges"].push_back({{"from", e.from}, {"to", e.to}, {"rel", rel_name(e.rel)}});
  return out.dump(2);
}

RetrievalResult khop(const Tcrg& graph, const std::string& task_id, int k)
{
  const auto it = graph.nodes.find(task_id);
  if (it == graph.nodes.end())
    throw UnknownNode("no node '" + task_id + "' in graph");
  if (it->second.kind != NodeKind::Task)
    throw NotATaskNode("'" + task_id + "' is a " + kind_name(it->second.kind) + " node");
  if (k < 0)
    throw std::invalid_argument("k must be non-negative");

  std::map<std::string, int> hop_of{{task_id, 0}};
  std::deque<std::string> queue{task_id};
  while (!queue.empty()) {
    const auto cur = queue.front();
    queue.pop_front();
    const int hop = hop_of.at(cur);
    if (hop >= k)
      continue;
    for (const auto& e : graph.edges) {
      if (e.from != cur || hop_of.count(e.to))
        continue;
      hop_of[e.to] = hop + 1;
      queue.push_back(e.to);
    }
  }

  RetrievalResult out;
  out.task_id = task_id;
  out.k = k;
  for (const auto& [id, hop] : hop_of) {
    if (id == task_id)
      continue;
    const auto& node = graph.nodes.at(id);
    if (node.kind == NodeKind::Task)
      continue;  // unreachable by edge-kind rules, defensive on loaded graphs
    auto& bucket = node.kind == NodeKind::Signal       ? out.signals
                   : node.kind == NodeKind::Transition ? out.transitions
                                                       : out.examples;
    bucket.push_back({id, node.text, hop});
  }
  auto by_hop_then_id = [](const HopItem& a, const HopItem& b) {
    return std::tie(a.hop, a.id) < std::tie(b.hop, b.id);
  };
  std::sort(out.signals.begin(), out.signals.end(), by_hop_then_id);
  std::sort(out.transitions.begin(), out.transitions.end(), by_hop_then_id);
  std::sort(out.examples.begin(), out.examples.end(), by_hop_then_id);
  return out;
}

std::string render_context(const RetrievalResult& result)
{
  std::string out;
  auto section = [&](const char* title, const std::vector<HopItem>& items) {
    if (items.empty())
      return;
    out += title;
    out += ":\n";
    for (const auto& item : items)
      out += "  - " + item.text + "\n";
  };
  section("signals", result.signals);
  section("transitions", result.transitions);
  section("examples", result.examples);
  return out;
}

}  // namespace rtlagent::tcrg
