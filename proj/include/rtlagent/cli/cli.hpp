#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtlagent/llm/llm.hpp"
#include "rtlagent/sim/sim_tools.hpp"

namespace rtlagent::cli {

/// One benchmark problem. Directory layout: `<id>/spec.txt` (the module
/// description handed to the agents), `<id>/tb.v` (self-checking bench with
/// its own inline reference model), optional `<id>/ref.v` (a known-good DUT
/// implementation, used by the fixture gate and available to transcripts),
/// optional `<id>/meta.json` ({"category": ..., "bugs": [...]}).
struct ProblemSpec {
  std::string id;
  std::string spec_text;
  std::string testbench_source;
  std::string category = "other";
};

struct ProblemLayoutError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TranscriptError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The problem taxonomy used for per-category reporting.
const std::vector<std::string>& known_categories();

ProblemSpec load_problem(const std::string& dir);

/// Mirrors the JSON config-file keys; command-line flags override file
/// values field by field.
struct RunConfig {
  std::string backend_url;       // chat-completions endpoint; unused when scripted
  std::string model = "default";
  std::string planner = "tcrg";  // "simple" (no graph stages) | "tcrg"
  bool ast_wt = true;
  int jobs = 1;
  int timeout_sim = 30;
  std::string out_dir = "out";
  std::string scripted_file;  // transcript fixtures; takes precedence over the backend
  bool verbose = false;
};

RunConfig parse_config(const std::string& json_text, const RunConfig& base = {});
RunConfig load_config(const std::string& path, const RunConfig& base = {});

/// "simple" | "simple+astwt" | "tcrg" | "tcrg+astwt"
std::string arm_key(const RunConfig& cfg);

/// Scripted conversations: {"<problem>": {"<arm>": [entry...]}}. Entry
/// forms, each with an optional "match" substring over the last user/tool
/// message:
///   {"reply": text}                        verbatim assistant reply
///   {"reply_file": path, "fence": tag?}    file content, optionally fenced
///   {"action": name, "input": text, "thought": text?}  react action
///   {"action": name, "input_file": path, ...}          input from a file
/// Paths resolve relative to the transcripts file. Arm lookup falls back
/// from "<planner>+astwt" to "<planner>".
class TranscriptSet {
public:
  static TranscriptSet load(const std::string& path);

  bool has(const std::string& problem, const std::string& arm) const;
  std::vector<llm::ScriptedBackend::Exchange> script(const std::string& problem,
                                                     const std::string& arm) const;
  std::vector<std::string> problems() const;

private:
  struct Entry {
    std::string match;  // empty = match anything
    std::string reply;
  };
  const std::vector<Entry>* find(const std::string& problem, const std::string& arm) const;
  std::map<std::string, std::map<std::string, std::vector<Entry>>> scripts_;
};

/// Timing is excluded from equality: scripted reruns must compare equal.
struct ProblemResult {
  std::string id;
  std::string category = "other";
  bool passed = false;
  std::string stop_reason;
  int simulate_calls = 0;
  int astwt_calls = 0;
  int syntax_calls = 0;
  double wall_seconds = 0.0;
  std::map<std::string, std::string> artifacts;  // name -> written path

  bool operator==(const ProblemResult& o) const
  {
    return id == o.id && category == o.category && passed == o.passed &&
           stop_reason == o.stop_reason && simulate_calls == o.simulate_calls &&
           astwt_calls == o.astwt_calls && syntax_calls == o.syntax_calls &&
           artifacts == o.artifacts;
  }
};

struct SuiteReport {
  std::vector<ProblemResult> problems;  // sorted by id

  int passed_count() const;
  double pass_rate() const;  // 0 on an empty report
  /// category -> (passed, total); categories with no problems are absent.
  std::map<std::string, std::pair<int, int>> category_rates() const;

  bool operator==(const SuiteReport&) const = default;
};

std::string to_json(const SuiteReport& report);
std::string render_table(const SuiteReport& report);

/// One problem end to end; writes final.v, plan.json, extraction/tcrg JSON
/// (graph arms), trace.jsonl, and result.json under
/// `<out_dir>/<id>/<arm>/`. Simulator or backend loss propagates
/// (sim::ToolUnavailable / llm::BackendUnavailable).
ProblemResult run_problem(const ProblemSpec& problem, const RunConfig& cfg);

/// Every problem directory under `problems_dir`, once each, up to
/// `cfg.jobs` in parallel. Per-problem script/layout failures are recorded
/// in the report; only harness loss aborts.
SuiteReport run_suite(const std::string& problems_dir, const RunConfig& cfg);

/// The four {planner, ast_wt} arms over one corpus.
struct AblationReport {
  std::map<std::string, SuiteReport> arms;  // keyed by arm_key

  bool operator==(const AblationReport&) const = default;
};

AblationReport run_ablation(const std::string& problems_dir, const RunConfig& cfg);
std::string to_json(const AblationReport& report);
/// 2x2 pass-rate grid (planner x waveform tool) plus per-category rates.
std::string render_grid(const AblationReport& report);

/// Fixture gate: each problem's ref.v passes its bench; every bug variant
/// documented in meta.json compiles but mismatches (at the documented time
/// when one is given).
struct FixtureReport {
  int problems = 0;
  int bugs = 0;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

FixtureReport validate_fixtures(const std::string& problems_dir,
                                const sim::SimulatorConfig& sim_cfg = {});

}  // namespace rtlagent::cli
