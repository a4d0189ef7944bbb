#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rtlagent/cli/cli.hpp"
#include "rtlagent/llm/llm.hpp"
#include "rtlagent/sim/sim_tools.hpp"

using namespace rtlagent;

namespace {

struct Flags {
  std::string config;
  std::string backend_url;
  std::string model;
  std::string planner;
  std::string ast_wt;  // "on" | "off"
  int jobs = 0;
  int timeout_sim = 0;
  std::string out_dir;
  std::string scripted;
  bool verbose = false;
};

void add_common(CLI::App* cmd, Flags& f)
{
  cmd->add_option("--config", f.config, "JSON config file; flags override its fields");
  cmd->add_option("--backend-url", f.backend_url, "chat-completions endpoint");
  cmd->add_option("--model", f.model, "model name sent to the backend");
  cmd->add_option("--planner", f.planner, "task planner: simple | tcrg")
      ->check(CLI::IsMember({"simple", "tcrg"}));
  cmd->add_option("--ast-wt", f.ast_wt, "waveform tracing tool: on | off")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--jobs", f.jobs, "problems run in parallel (suite only)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--timeout-sim", f.timeout_sim, "per-simulation timeout, seconds")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out_dir, "output directory for artifacts and reports");
  cmd->add_option("--scripted", f.scripted, "scripted transcript file (replaces the backend)");
  cmd->add_flag("--verbose", f.verbose, "per-problem progress on stderr");
}

// Start from the config file when given, then let explicit flags win.
cli::RunConfig resolve(const CLI::App& cmd, const Flags& f)
{
  cli::RunConfig cfg;
  if (!f.config.empty()) cfg = cli::load_config(f.config);
  if (cmd.count("--backend-url")) cfg.backend_url = f.backend_url;
  if (cmd.count("--model")) cfg.model = f.model;
  if (cmd.count("--planner")) cfg.planner = f.planner;
  if (cmd.count("--ast-wt")) cfg.ast_wt = f.ast_wt == "on";
  if (cmd.count("--jobs")) cfg.jobs = f.jobs;
  if (cmd.count("--timeout-sim")) cfg.timeout_sim = f.timeout_sim;
  if (cmd.count("--out")) cfg.out_dir = f.out_dir;
  if (cmd.count("--scripted")) cfg.scripted_file = f.scripted;
  if (cmd.count("--verbose")) cfg.verbose = true;
  (void)cli::arm_key(cfg);  // rejects an invalid planner from the config file
  return cfg;
}

void write_report(const std::filesystem::path& path, const std::string& content)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw cli::ConfigError("cannot write '" + path.string() + "'");
  out << content << "\n";
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"autonomous Verilog completion over self-checking benches"};
  app.require_subcommand(1);

  Flags run_flags;
  Flags suite_flags;
  std::string problem_dir;
  std::string suite_dir;
  bool ablation = false;
  bool check_fixtures = false;

  auto* run = app.add_subcommand("run", "solve one problem directory");
  run->add_option("--problem", problem_dir, "problem directory (spec.txt + tb.v)")->required();
  add_common(run, run_flags);

  auto* suite = app.add_subcommand("suite", "solve every problem under a directory");
  suite->add_option("--dir", suite_dir, "directory of problem directories")->required();
  suite->add_flag("--ablation", ablation, "run all four planner/ast-wt arms");
  suite->add_flag("--check-fixtures", check_fixtures,
                  "validate golden sources and planted bugs, then exit");
  add_common(suite, suite_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto cfg = resolve(*run, run_flags);
      const auto result = cli::run_problem(cli::load_problem(problem_dir), cfg);
      std::cout << (result.passed ? "pass" : "FAIL") << "  " << result.id << "  ("
                << result.stop_reason << ")\n";
      for (const auto& [name, path] : result.artifacts)
        std::cout << "  " << name << ": " << path << "\n";
      return result.passed ? 0 : 2;
    }

    const auto cfg = resolve(*suite, suite_flags);
    if (check_fixtures) {
      sim::SimulatorConfig sim_cfg;
      sim_cfg.timeout_seconds = cfg.timeout_sim;
      const auto gate = cli::validate_fixtures(suite_dir, sim_cfg);
      std::cout << "checked " << gate.problems << " problems, " << gate.bugs
                << " planted bugs\n";
      for (const auto& v : gate.violations) std::cout << "  violation: " << v << "\n";
      return gate.ok() ? 0 : 2;
    }

    std::filesystem::create_directories(cfg.out_dir);
    if (ablation) {
      const auto report = cli::run_ablation(suite_dir, cfg);
      const auto path = std::filesystem::path(cfg.out_dir) / "ablation.json";
      write_report(path, cli::to_json(report));
      std::cout << cli::render_grid(report) << "report: " << path.string() << "\n";
      return 0;
    }
    const auto report = cli::run_suite(suite_dir, cfg);
    const auto path = std::filesystem::path(cfg.out_dir) / "report.json";
    write_report(path, cli::to_json(report));
    std::cout << cli::render_table(report) << "report: " << path.string() << "\n";
    return 0;
  } catch (const cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
  } catch (const cli::ProblemLayoutError& e) {
    std::cerr << "problem layout error: " << e.what() << "\n";
  } catch (const cli::TranscriptError& e) {
    std::cerr << "transcript error: " << e.what() << "\n";
  } catch (const sim::ToolUnavailable& e) {
    std::cerr << "simulator unavailable: " << e.what() << "\n";
  } catch (const llm::BackendUnavailable& e) {
    std::cerr << "backend unavailable: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 1;
}
