#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtlagent::plan {

enum class TaskKind { Write, Verify };
enum class TaskStatus { Pending, Running, Done, Failed };

struct Subtask {
  std::string id;
  TaskKind kind = TaskKind::Write;
  std::string description;
  std::string context;  // retrieved graph text attached by the planner
  std::vector<std::string> depends_on;
};

struct TaskPlan {
  std::vector<Subtask> subtasks;
};

struct PlanFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PlanValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CycleError : std::runtime_error {
  CycleError(const std::string& what, std::vector<std::string> cycle_ids)
      : std::runtime_error(what), cycle(std::move(cycle_ids))
  {
  }
  std::vector<std::string> cycle;
};

/// Wire format: JSON array of {id, type: "write"|"verify", description,
/// context?, depends_on?}. A task without depends_on depends on the task
/// before it; an explicit empty array makes a root. When the plan does not
/// end in a verify task, a terminal one is appended depending on every
/// sink.
TaskPlan parse_plan(const std::string& json_text);
std::string to_json(const TaskPlan& plan);

class TaskDag {
public:
  std::vector<Subtask> nodes;  // plan order
  std::map<std::string, std::vector<std::string>> parents;
  std::map<std::string, std::vector<std::string>> children;

  const Subtask& node(const std::string& id) const;
  TaskStatus status(const std::string& id) const { return status_.at(id); }

  /// Pending tasks whose parents are all done; empty forever once any
  /// task failed.
  std::set<std::string> next_ready() const;

  void mark_running(const std::string& id);
  void mark_done(const std::string& id);
  void mark_failed(const std::string& id);

  bool halted() const;    // some task failed
  bool all_done() const;  // every task done

private:
  friend TaskDag build_dag(const TaskPlan&);
  std::map<std::string, TaskStatus> status_;
};

/// Validates acyclicity; all statuses start pending.
TaskDag build_dag(const TaskPlan& plan);

}  // namespace rtlagent::plan
