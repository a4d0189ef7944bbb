#pragma once

#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rtlagent/llm/llm.hpp"
#include "rtlagent/plan/plan.hpp"
#include "rtlagent/sim/sim_tools.hpp"
#include "rtlagent/tcrg/tcrg.hpp"

namespace rtlagent::agents {

/// Append-only JSONL sink: one line per chat turn, tool call, or agent
/// outcome, flushed immediately so a crash loses nothing already decided.
/// Default-constructed logs swallow everything.
class TraceLog {
public:
  TraceLog() = default;
  TraceLog(const std::string& path, std::string problem_id);

  void record(const std::string& kind, const std::string& payload_json);
  bool enabled() const { return static_cast<bool>(out_); }

private:
  std::shared_ptr<std::ofstream> out_;
  std::shared_ptr<std::mutex> mu_;
  std::string problem_id_;
};

struct AgentOutcome {
  bool ok = false;
  std::string artifact;  // plan JSON | extraction JSON | enriched plan JSON | Verilog source
  std::vector<llm::ReactTrace> traces;       // tool-using loops, one per loop run
  std::vector<llm::ChatMessage> transcript;  // generator–critic chats, chronological
  int rounds = 0;
};

/// The extraction model failed schema validation twice.
struct ExtractionInvalid : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Role prompts; defaults work offline with scripted transcripts and are
/// overridable from the CLI configuration file.
struct Prompts {
  std::string planner =
      "You are a hardware design planner. Break the module specification into small, "
      "ordered coding sub-tasks. Reply with one fenced JSON array; each entry is "
      "{\"id\": string, \"type\": \"write\"|\"verify\", \"description\": string, "
      "\"depends_on\": [ids]}. Name in each description the exact output signals and the "
      "logic that step implements, and end the plan with a verify task.";
  std::string plan_critic =
      "You review task plans for Verilog work. Check the draft plan against the "
      "specification: every output covered, no step needing signals produced by a later "
      "step, a final verification step. If the plan is sound, reply APPROVED. Otherwise "
      "list the problems to fix.";
  std::string extraction =
      "You read a hardware module specification and list its circuit details. Reply with "
      "one fenced JSON object: {\"signals\": [{\"name\", \"description\"}], "
      "\"transitions\": [{\"label\", \"description\", \"referenced_signals\"}], "
      "\"examples\": [{\"description\", \"referenced_signals\"}]}. Every "
      "referenced_signals entry must name a listed signal; use empty lists when the "
      "specification has none.";
  std::string retrieval =
      "You enrich one coding sub-task with the circuit details it needs. Call the khop "
      "tool with {\"k\": N} to fetch the signals, transitions, and examples linked to "
      "this sub-task, raising k only when the current details look incomplete. Then "
      "reply FINAL whose action_input holds just the details relevant to the sub-task, "
      "or 'no circuit details' when there are none.";
  std::string engineer =
      "You are a Verilog engineer building one module incrementally. Implement exactly "
      "the current sub-task on top of the existing code, keeping everything already "
      "written. Always reply with the complete module source in one fenced code block — "
      "never a fragment or a diff. Use synthesizable Verilog-2001.";
  std::string code_critic =
      "You verify a Verilog draft. Use the check_syntax tool (it compiles the engineer's "
      "current draft; action_input is ignored) and review whether the draft implements "
      "the sub-task consistently with the rest of the code. Reply FINAL with "
      "action_input starting with APPROVED when it compiles and matches the sub-task; "
      "otherwise FINAL with a short list of required fixes.";
  std::string debug =
      "You fix functional bugs in a Verilog module. Tools: simulate runs the testbench — "
      "pass a complete replacement module as action_input to change the code first, or "
      "an empty input to run the current code; ast_wt_trace takes {\"signals\": "
      "[names], \"level\": N} and shows each signal's driving statements plus a waveform "
      "table around the first mismatch. Work stepwise: simulate, inspect, fix, "
      "re-simulate. Reply FINAL only when the last simulation reports zero mismatches, "
      "or when you cannot make progress.";
};

/// Generator–critic loop over the plan schema: the planner drafts a fenced
/// JSON plan, the reviewer approves (a reply starting APPROVED) or returns
/// feedback. ok=false with the last draft once the round budget is spent.
AgentOutcome run_high_level_planner(const std::string& spec_text, llm::Backend& backend,
                                    const Prompts& prompts = {}, int round_budget = 8,
                                    TraceLog* log = nullptr);

/// One shot plus one reformat retry; throws ExtractionInvalid when the
/// second reply still fails schema validation.
AgentOutcome run_extraction(const std::string& spec_text, llm::Backend& backend,
                            const Prompts& prompts = {}, TraceLog* log = nullptr);

/// One khop react loop per sub-task; each loop's final answer becomes that
/// sub-task's context. A loop that misses its budget leaves the context
/// empty and flips ok to false. artifact = the enriched plan JSON.
AgentOutcome run_retrieval(const plan::TaskPlan& plan_in, const tcrg::Tcrg& graph,
                           llm::Backend& backend, const Prompts& prompts = {},
                           llm::ReactLimits limits = {}, TraceLog* log = nullptr);

struct SyntaxCheck {
  bool ok = false;
  std::string detail;
};
using SyntaxChecker = std::function<SyntaxCheck(const std::string& source)>;

/// Engineer drafts the full cumulative module; a verification react loop
/// (check_syntax tool + consistency review) approves or sends fixes back.
/// ok requires both the reviewer's APPROVED and a passing harness-side
/// syntax check of the final draft. rounds counts engineer turns.
AgentOutcome run_code_agent(const plan::Subtask& subtask, const std::string& current_source,
                            llm::Backend& backend, const SyntaxChecker& check_syntax,
                            const Prompts& prompts = {}, int round_budget = 8,
                            llm::ReactLimits verify_limits = {}, TraceLog* log = nullptr);

struct DebugConfig {
  std::string workdir;  // simulation scratch; reused across the loop's runs
  bool ast_wt = true;
  std::string clock = "clk";
  std::string scope = "tb.dut";  // dump scope of the device under test
  sim::MismatchRules rules{};
  sim::SimulatorConfig sim{};
  llm::ReactLimits limits{};
};

/// React loop over {simulate, ast_wt_trace (optional)}. Code edits happen
/// only through simulate's replacement-module input, so ok is exactly
/// "the last simulation ran the final code and reported zero mismatches".
/// A missing simulator aborts with sim::ToolUnavailable.
AgentOutcome run_debug_agent(const std::string& module_source, const std::string& testbench,
                             llm::Backend& backend, const DebugConfig& cfg,
                             const Prompts& prompts = {}, TraceLog* log = nullptr);

struct PipelineConfig {
  bool use_tcrg = true;  // extraction + graph + retrieval stages
  bool ast_wt = true;    // debug agent's waveform-tracing tool
  std::string workdir;
  std::string clock = "clk";
  std::string scope = "tb.dut";
  sim::MismatchRules rules{};
  sim::SimulatorConfig sim{};
  Prompts prompts{};
  int planner_rounds = 8;
  int code_rounds = 8;
  llm::ReactLimits react_limits{};
};

struct PipelineResult {
  bool passed = false;
  std::string stop_reason;  // "ok" | "planner_budget" | "extraction_invalid" |
                            // "task <id> failed" | "recheck_mismatch"
  std::string final_source;
  std::string plan_json;        // enriched when the graph stages ran
  std::string extraction_json;  // empty without them
  std::string graph_json;
  int simulate_calls = 0;
  int astwt_calls = 0;
  int syntax_calls = 0;
};

/// Full flow: plan → (extract → graph → retrieve) → execute the DAG with
/// code/debug agents → independent re-simulation of the final source in a
/// wiped workdir. `passed` reports only what that re-check confirms.
PipelineResult run_pipeline(const std::string& spec_text, const std::string& testbench,
                            llm::Backend& backend, const PipelineConfig& cfg,
                            TraceLog* log = nullptr);

/// The re-check gate by itself: wipe `workdir`, compile + simulate
/// `final_source` against the testbench, true iff zero mismatches.
bool independent_recheck(const std::string& final_source, const std::string& testbench,
                         const std::string& workdir, const sim::MismatchRules& rules = {},
                         const sim::SimulatorConfig& sim_cfg = {});

}  // namespace rtlagent::agents
