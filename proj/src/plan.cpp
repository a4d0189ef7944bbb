#include "rtlagent/plan/plan.hpp"

#include <algorithm>

#include <json.hpp>

namespace rtlagent::plan {

using nlohmann::json;

namespace {

std::string id_of(const json& value)
{
  if (value.is_string())
    return value.get<std::string>();
  if (value.is_number_integer())
    return std::to_string(value.get<long long>());
  throw PlanFormatError("task id must be a string or integer");
}

void validate(const TaskPlan& plan)
{
  std::set<std::string> ids;
  for (const auto& t : plan.subtasks) {
    if (t.id.empty())
      throw PlanValidationError("empty task id");
    if (!ids.insert(t.id).second)
      throw PlanValidationError("duplicate task id '" + t.id + "'");
  }
  for (const auto& t : plan.subtasks)
    for (const auto& dep : t.depends_on)
      if (!ids.count(dep))
        throw PlanValidationError("task '" + t.id + "' depends on unknown task '" + dep + "'");
}

}  // namespace

TaskPlan parse_plan(const std::string& json_text)
{
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw PlanFormatError(std::string("plan is not valid JSON: ") + e.what());
  }
  if (!doc.is_array() || doc.empty())
    throw PlanFormatError("plan must be a nonempty JSON array of tasks");

  TaskPlan plan;
  for (const auto& item : doc) {
    if (!item.is_object())
      throw PlanFormatError("each plan entry must be an object");
    Subtask t;
    if (!item.contains("id"))
      throw PlanFormatError("plan entry missing 'id'");
    t.id = id_of(item.at("id"));
    const auto type = item.value("type", std::string("write"));
    if (type == "write")
      t.kind = TaskKind::Write;
    else if (type == "verify")
      t.kind = TaskKind::Verify;
    else
      throw PlanFormatError("task '" + t.id + "' has unknown type '" + type + "'");
    if (!item.contains("description") || !item.at("description").is_string())
      throw PlanFormatError("task '" + t.id + "' missing string 'description'");
    t.description = item.at("description").get<std::string>();
    t.context = item.value("context", std::string());
    if (item.contains("depends_on")) {
      if (!item.at("depends_on").is_array())
        throw PlanFormatError("task '" + t.id + "' depends_on must be an array");
      for (const auto& dep : item.at("depends_on"))
        t.depends_on.push_back(id_of(dep));
    } else if (!plan.subtasks.empty()) {
      // linear default: depend on the previous sub-task
      t.depends_on.push_back(plan.subtasks.back().id);
    }
    plan.subtasks.push_back(std::move(t));
  }

  validate(plan);

  if (plan.subtasks.back().kind != TaskKind::Verify) {
    // Append the terminal verification task, depending on every sink.
    std::set<std::string> has_child;
    for (const auto& t : plan.subtasks)
      for (const auto& dep : t.depends_on)
        has_child.insert(dep);
    Subtask v;
    v.id = "verify_final";
    while (std::any_of(plan.subtasks.begin(), plan.subtasks.end(),
                       [&](const Subtask& t) { return t.id == v.id; }))
      v.id += "_";
    v.kind = TaskKind::Verify;
    v.description =
        "Verify the generated Verilog module against the provided testbench and fix any "
        "functional mismatches.";
    for (const auto& t : plan.subtasks)
      if (!has_child.count(t.id))
        v.depends_on.push_back(t.id);
    plan.subtasks.push_back(std::move(v));
  }
  return plan;
}

std::string to_json(const TaskPlan& plan)
{
  json arr = json::array();
  for (const auto& t : plan.subtasks) {
    json item;
    item["id"] = t.id;
    item["type"] = t.kind == TaskKind::Write ? "write" : "verify";
    item["description"] = t.description;
    item["context"] = t.context;
    item["depends_on"] = t.depends_on;
    arr.push_back(std::move(item));
  }
  return arr.dump(2);
}

const Subtask& TaskDag::node(const std::string& id) const
{
  for (const auto& t : nodes)
    if (t.id == id)
      return t;
  throw PlanValidationError("unknown task '" + id + "'");
}

std::set<std::string> TaskDag::next_ready() const
{
  if (halted())
    return {};
  std::set<std::string> ready;
  for (const auto& t : nodes) {
    if (status_.at(t.id) != TaskStatus::Pending)
      continue;
    bool ok = true;
    for (const auto& p : parents.at(t.id))
      ok = ok && status_.at(p) == TaskStatus::Done;
    if (ok)
      ready.insert(t.id);
  }
  return ready;
}

void TaskDag::mark_running(const std::string& id)
{
  if (status_.at(id) != TaskStatus::Pending)
    throw std::logic_error("task '" + id + "' is not pending");
  for (const auto& p : parents.at(id))
    if (status_.at(p) != TaskStatus::Done)
      throw std::logic_error("task '" + id + "' started before parent '" + p + "' finished");
  status_[id] = TaskStatus::Running;
}

void TaskDag::mark_done(const std::string& id)
{
  if (status_.at(id) != TaskStatus::Running)
    throw std::logic_error("task '" + id + "' is not running");
  status_[id] = TaskStatus::Done;
}

void TaskDag::mark_failed(const std::string& id)
{
  if (status_.at(id) != TaskStatus::Running)
    throw std::logic_error("task '" + id + "' is not running");
  status_[id] = TaskStatus::Failed;
}

bool TaskDag::halted() const
{
  return std::any_of(nodes.begin(), nodes.end(), [&](const Subtask& t) {
    return status_.at(t.id) == TaskStatus::Failed;
  });
}

bool TaskDag::all_done() const
{
  return std::all_of(nodes.begin(), nodes.end(), [&](const Subtask& t) {
    return status_.at(t.id) == TaskStatus::Done;
  });
}

TaskDag build_dag(const TaskPlan& plan)
{
  validate(plan);
  TaskDag dag;
  dag.nodes = plan.subtasks;
  for (const auto& t : dag.nodes) {
    dag.parents[t.id] = t.depends_on;
    dag.children[t.id];
    dag.status_[t.id] = TaskStatus::Pending;
  }
  for (const auto& t : dag.nodes)
    for (const auto& dep : t.depends_on)
      dag.children[dep].push_back(t.id);

  // Cycle check: DFS with a path stack so the error can name the loop.
  std::map<std::string, int> color;  // 0 white, 1 on stack, 2 done
  std::vector<std::string> stack;
  auto dfs = [&](auto&& self, const std::string& id) -> void {
    color[id] = 1;
    stack.push_back(id);
    for (const auto& child : dag.children.at(id)) {
      if (color[child] == 1) {
        std::vector<std::string> cycle;
        auto it = std::find(stack.begin(), stack.end(), child);
        for (; it != stack.end(); ++it)
          cycle.push_back(*it);
        std::string what = "dependency cycle:";
        for (const auto& n : cycle)
          what += " " + n;
        throw CycleError(what, cycle);
      }
      if (color[child] == 0)
        self(self, child);
    }
    stack.pop_back();
    color[id] = 2;
  };
  for (const auto& t : dag.nodes)
    if (color[t.id] == 0)
      dfs(dfs, t.id);
  return dag;
}

}  // namespace rtlagent::plan
