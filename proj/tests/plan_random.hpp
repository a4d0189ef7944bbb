#pragma once

// Random task-plan generator plus an independent topological-order oracle,
// shared by the unit tests and the acceptance suite.

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "rtlagent/plan/plan.hpp"

namespace testgen {

// Random DAG: each task may depend only on earlier tasks, so the result is
// acyclic by construction. The last task is the verification step.
inline rtlagent::plan::TaskPlan make_plan(std::mt19937& rng)
{
  using namespace rtlagent::plan;
  std::uniform_int_distribution<int> n_dist(1, 18);
  const int n = n_dist(rng);
  TaskPlan plan;
  for (int i = 0; i < n; ++i) {
    Subtask t;
    t.id = "t" + std::to_string(i + 1);
    t.kind = i + 1 == n ? TaskKind::Verify : TaskKind::Write;
    t.description = "step " + std::to_string(i + 1);
    if (i > 0) {
      std::uniform_int_distribution<int> dep_count(0, std::min(i, 3));
      std::set<int> picked;
      const int want = dep_count(rng);
      std::uniform_int_distribution<int> pick(0, i - 1);
      while (static_cast<int>(picked.size()) < want)
        picked.insert(pick(rng));
      for (int p : picked)
        t.depends_on.push_back("t" + std::to_string(p + 1));
    }
    plan.subtasks.push_back(std::move(t));
  }
  return plan;
}

// Valid schedule: every task appears exactly once, after all its parents.
inline bool is_topo_order(const rtlagent::plan::TaskPlan& plan,
                          const std::vector<std::string>& order)
{
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < order.size(); ++i)
    if (!pos.emplace(order[i], i).second)
      return false;  // executed twice
  if (pos.size() != plan.subtasks.size())
    return false;
  for (const auto& t : plan.subtasks)
    for (const auto& dep : t.depends_on)
      if (pos.at(dep) >= pos.at(t.id))
        return false;
  return true;
}

}  // namespace testgen
