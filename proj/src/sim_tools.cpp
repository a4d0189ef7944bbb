#include "rtlagent/sim/sim_tools.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>

#include "rtlagent/support/subprocess.hpp"

namespace rtlagent::sim {

namespace fs = std::filesystem;

namespace {

void write_or_throw(const fs::path& path, const std::string& content)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out.good())
    throw WorkdirError("cannot write " + path.string());
  out << content;
  if (!out.good())
    throw WorkdirError("short write to " + path.string());
}

fs::path prepare_workdir(const std::string& workdir)
{
  fs::path dir(workdir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw WorkdirError("cannot create workdir " + workdir);
  return dir;
}

void require_binary(const std::string& name)
{
  if (!support::binary_on_path(name))
    throw ToolUnavailable("simulator binary '" + name + "' not found");
}

std::vector<CompileDiag> parse_compiler_output(const std::string& text)
{
  std::vector<CompileDiag> diags;
  static const std::regex line_re(R"(^([^:\s]+\.(?:v|sv|vh|svh)):(\d+):\s*(.*)$)");
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::smatch m;
    if (!std::regex_match(line, m, line_re))
      continue;
    CompileDiag d;
    d.line = std::stoi(m[2]);
    d.message = m[3];
    d.severity = d.message.find("warning") != std::string::npos ? "warning" : "error";
    diags.push_back(std::move(d));
  }
  return diags;
}

bool has_error(const std::vector<CompileDiag>& diags)
{
  return std::any_of(diags.begin(), diags.end(),
                     [](const CompileDiag& d) { return d.severity == "error"; });
}

}  // namespace

CompileReport check_syntax(const std::string& dut_source, const std::string& workdir,
                           const SimulatorConfig& cfg)
{
  require_binary(cfg.compiler);
  const auto dir = prepare_workdir(workdir);
  write_or_throw(dir / "dut.v", dut_source);

  std::vector<std::string> argv = {cfg.compiler, "-t", "null"};
  argv.insert(argv.end(), cfg.extra_flags.begin(), cfg.extra_flags.end());
  argv.push_back("dut.v");
  auto run = support::run_process(argv, dir, std::chrono::seconds(cfg.timeout_seconds));

  CompileReport report;
  report.raw_output = run.err + run.out;
  report.diagnostics = parse_compiler_output(report.raw_output);
  report.ok = run.exit_code == 0 && !run.timed_out && !has_error(report.diagnostics);
  return report;
}

RefDutDivergence ref_dut_divergence(const wave::WaveDb& db)
{
  struct Pair {
    std::string base;  // name with the suffix stripped
    std::string ref;
    std::string dut;
  };
  std::vector<Pair> pairs;
  for (const auto& sig : db.signals) {
    constexpr std::string_view kRef = "_ref";
    if (sig.name.size() <= kRef.size() ||
        sig.name.compare(sig.name.size() - kRef.size(), kRef.size(), kRef) != 0)
      continue;
    const auto stem = sig.name.substr(0, sig.name.size() - kRef.size());
    if (const auto* dut = db.find(stem + "_dut")) {
      const auto dot = stem.rfind('.');
      pairs.push_back({stem.substr(dot == std::string::npos ? 0 : dot + 1), sig.name, dut->name});
    }
  }

  RefDutDivergence result;
  if (pairs.empty())
    return result;

  std::set<std::uint64_t> times;
  for (const auto& p : pairs) {
    for (const auto& name : {p.ref, p.dut}) {
      const auto it = db.changes.find(name);
      if (it == db.changes.end())
        continue;
      for (const auto& ch : it->second)
        times.insert(ch.time);
    }
  }
  for (const auto t : times) {
    std::vector<std::string> differing;
    for (const auto& p : pairs) {
      const auto rv = db.value_at(p.ref, t);
      const auto dv = db.value_at(p.dut, t);
      if (rv.find('x') == std::string::npos && rv != dv)
        differing.push_back(p.base);
    }
    if (!differing.empty()) {
      result.first_time = t;
      result.signals = std::move(differing);
      return result;
    }
  }
  return result;
}

SimReport simulate(const std::string& dut_source, const std::string& testbench_source,
                   const std::string& workdir, const MismatchRules& rules,
                   const SimulatorConfig& cfg)
{
  require_binary(cfg.compiler);
  require_binary(cfg.runner);
  const auto dir = prepare_workdir(workdir);
  write_or_throw(dir / "dut.v", dut_source);
  write_or_throw(dir / "tb.v", testbench_source);

  SimReport report;

  std::vector<std::string> compile_argv = {cfg.compiler, "-o", "sim.out"};
  compile_argv.insert(compile_argv.end(), cfg.extra_flags.begin(), cfg.extra_flags.end());
  compile_argv.push_back("dut.v");
  compile_argv.push_back("tb.v");
  auto compile = support::run_process(compile_argv, dir, std::chrono::seconds(cfg.timeout_seconds));
  report.diagnostics = parse_compiler_output(compile.err + compile.out);
  if (compile.exit_code != 0 || compile.timed_out || has_error(report.diagnostics)) {
    report.compiled = false;
    report.raw_stdout = compile.err + compile.out;
    return report;
  }
  report.compiled = true;

  auto run = support::run_process({cfg.runner, "sim.out"}, dir,
                                  std::chrono::seconds(cfg.timeout_seconds));
  report.raw_stdout = run.out;
  write_or_throw(dir / "stdout.log", run.out + run.err);
  if (run.timed_out) {
    report.timed_out = true;
    return report;
  }

  try {
    std::smatch m;
    if (std::regex_search(report.raw_stdout, m, std::regex(rules.count_pattern))) {
      if (m.size() >= 2)
        report.mismatch_count = std::stoll(m[1]);
      if (m.size() >= 3)
        report.total_samples = std::stoll(m[2]);
    }
    if (!rules.time_pattern.empty() &&
        std::regex_search(report.raw_stdout, m, std::regex(rules.time_pattern)) && m.size() >= 2)
      report.first_mismatch_time = std::stoull(m[1]);
  } catch (const std::regex_error& e) {
    throw WorkdirError(std::string("bad mismatch rule pattern: ") + e.what());
  }

  const auto vcd = dir / "wave.vcd";
  if (fs::exists(vcd))
    report.vcd_path = vcd.string();

  // A mismatch time only makes sense alongside mismatches.
  if (report.mismatch_count.value_or(0) == 0)
    report.first_mismatch_time.reset();

  // Waveform fallback for the mismatch time.
  if (report.mismatch_count.value_or(0) > 0 && !report.first_mismatch_time && report.vcd_path) {
    try {
      std::ifstream in(*report.vcd_path, std::ios::binary);
      std::ostringstream os;
      os << in.rdbuf();
      auto db = wave::parse_vcd(os.str());
      auto div = ref_dut_divergence(db);
      if (div.first_time)
        report.first_mismatch_time = div.first_time;
    } catch (const std::exception&) {
      // fallback only; stdout statistics stand on their own
    }
  }
  return report;
}

}  // namespace rtlagent::sim
