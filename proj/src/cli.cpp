#include "rtlagent/cli/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "rtlagent/agents/agents.hpp"

namespace rtlagent::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::optional<std::string> try_read(const fs::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool blank(const std::string& s)
{
  return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

void write_file(const fs::path& path, const std::string& content)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << content;
}

json problem_json(const ProblemResult& r)
{
  json artifacts = json::object();
  for (const auto& [name, path] : r.artifacts) artifacts[name] = path;
  return json{{"id", r.id},
              {"category", r.category},
              {"passed", r.passed},
              {"stop_reason", r.stop_reason},
              {"simulate_calls", r.simulate_calls},
              {"astwt_calls", r.astwt_calls},
              {"syntax_calls", r.syntax_calls},
              {"wall_seconds", r.wall_seconds},
              {"artifacts", artifacts}};
}

std::string pct(double rate)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", rate * 100.0);
  return buf;
}

// Problem directories are whatever subdirectories carry a spec.txt; anything
// else under the suite root (shared include dirs, notes) is ignored.
std::vector<fs::path> problem_dirs(const std::string& problems_dir)
{
  if (!fs::is_directory(problems_dir))
    throw ConfigError("problems directory '" + problems_dir + "' does not exist");
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(problems_dir))
    if (entry.is_directory() && fs::exists(entry.path() / "spec.txt"))
      dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

}  // namespace

const std::vector<std::string>& known_categories()
{
  static const std::vector<std::string> kCats = {
      "Application-Descr",     "CombSeqFSM-Descr", "CombSeqFSM-Waveform",
      "Comb-Kmap",             "FSM-TransTable",   "other"};
  return kCats;
}

ProblemSpec load_problem(const std::string& dir)
{
  fs::path root(dir);
  ProblemSpec problem;
  problem.id = root.filename().string();
  if (problem.id.empty()) problem.id = root.parent_path().filename().string();

  auto spec = try_read(root / "spec.txt");
  if (!spec || blank(*spec))
    throw ProblemLayoutError("missing or empty spec.txt in " + dir);
  auto tb = try_read(root / "tb.v");
  if (!tb || blank(*tb))
    throw ProblemLayoutError("missing or empty tb.v in " + dir);
  problem.spec_text = std::move(*spec);
  problem.testbench_source = std::move(*tb);

  if (auto meta = try_read(root / "meta.json")) {
    json doc = json::parse(*meta, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
      throw ProblemLayoutError("meta.json in " + dir + " is not a JSON object");
    if (doc.contains("category")) {
      if (!doc.at("category").is_string())
        throw ProblemLayoutError("meta.json category in " + dir + " must be a string");
      const auto cat = doc.at("category").get<std::string>();
      const auto& known = known_categories();
      if (std::find(known.begin(), known.end(), cat) == known.end())
        throw ProblemLayoutError("unknown category '" + cat + "' in " + dir);
      problem.category = cat;
    }
  }
  return problem;
}

RunConfig parse_config(const std::string& json_text, const RunConfig& base)
{
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw ConfigError("config must be a JSON object");

  static const std::vector<std::string> kKeys = {
      "backend_url", "model",       "planner", "ast_wt", "jobs",
      "timeout_sim", "out",         "scripted", "verbose"};
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end())
      throw ConfigError("unknown config key '" + key + "'");
  }

  RunConfig cfg = base;
  const auto get_str = [&](const char* key, std::string& out) {
    if (!doc.contains(key)) return;
    if (!doc.at(key).is_string())
      throw ConfigError(std::string("config key '") + key + "' must be a string");
    out = doc.at(key).get<std::string>();
  };
  const auto get_bool = [&](const char* key, bool& out) {
    if (!doc.contains(key)) return;
    if (!doc.at(key).is_boolean())
      throw ConfigError(std::string("config key '") + key + "' must be a boolean");
    out = doc.at(key).get<bool>();
  };
  const auto get_int = [&](const char* key, int& out) {
    if (!doc.contains(key)) return;
    if (!doc.at(key).is_number_integer())
      throw ConfigError(std::string("config key '") + key + "' must be an integer");
    out = doc.at(key).get<int>();
  };

  get_str("backend_url", cfg.backend_url);
  get_str("model", cfg.model);
  get_str("planner", cfg.planner);
  get_str("out", cfg.out_dir);
  get_str("scripted", cfg.scripted_file);
  get_bool("ast_wt", cfg.ast_wt);
  get_bool("verbose", cfg.verbose);
  get_int("jobs", cfg.jobs);
  get_int("timeout_sim", cfg.timeout_sim);

  if (cfg.planner != "simple" && cfg.planner != "tcrg")
    throw ConfigError("planner must be \"simple\" or \"tcrg\", got \"" + cfg.planner + "\"");
  if (cfg.jobs < 1) throw ConfigError("jobs must be at least 1");
  if (cfg.timeout_sim < 1) throw ConfigError("timeout_sim must be at least 1 second");
  return cfg;
}

RunConfig load_config(const std::string& path, const RunConfig& base)
{
  auto text = try_read(path);
  if (!text) throw ConfigError("cannot read config file '" + path + "'");
  return parse_config(*text, base);
}

std::string arm_key(const RunConfig& cfg)
{
  if (cfg.planner != "simple" && cfg.planner != "tcrg")
    throw ConfigError("planner must be \"simple\" or \"tcrg\", got \"" + cfg.planner + "\"");
  return cfg.planner + (cfg.ast_wt ? "+astwt" : "");
}

TranscriptSet TranscriptSet::load(const std::string& path)
{
  auto text = try_read(path);
  if (!text) throw TranscriptError("cannot read transcripts file '" + path + "'");
  json doc = json::parse(*text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw TranscriptError("transcripts file must be a JSON object keyed by problem id");

  const fs::path base = fs::path(path).parent_path();
  const auto read_rel = [&](const std::string& rel, const std::string& where) {
    auto content = try_read(base / rel);
    if (!content)
      throw TranscriptError("cannot read '" + rel + "' referenced by " + where);
    return *content;
  };

  TranscriptSet set;
  try {
    for (const auto& [prob, arms] : doc.items()) {
      if (!arms.is_object())
        throw TranscriptError("problem '" + prob + "' must map arm names to entry arrays");
      for (const auto& [arm, entries] : arms.items()) {
        if (!entries.is_array())
          throw TranscriptError(prob + "/" + arm + " must be an array of entries");
        std::vector<Entry> script;
        for (const auto& e : entries) {
          const std::string where = prob + "/" + arm;
          if (!e.is_object()) throw TranscriptError("entry in " + where + " is not an object");
          Entry entry;
          entry.match = e.value("match", std::string());
          if (e.contains("reply") || e.contains("reply_file")) {
            std::string body = e.contains("reply") ? e.at("reply").get<std::string>()
                                                   : read_rel(e.at("reply_file").get<std::string>(), where);
            if (e.contains("fence")) {
              if (!body.empty() && body.back() != '\n') body += '\n';
              body = "```" + e.value("fence", std::string()) + "\n" + body + "```";
            }
            entry.reply = std::move(body);
          } else if (e.contains("action")) {
            std::string input = e.contains("input_file")
                                    ? read_rel(e.at("input_file").get<std::string>(), where)
                                    : e.value("input", std::string());
            json action = {{"thought", e.value("thought", std::string())},
                           {"action", e.at("action").get<std::string>()},
                           {"action_input", std::move(input)}};
            entry.reply = "```json\n" + action.dump() + "\n```";
          } else {
            throw TranscriptError("entry in " + where + " needs reply, reply_file, or action");
          }
          script.push_back(std::move(entry));
        }
        set.scripts_[prob][arm] = std::move(script);
      }
    }
  } catch (const json::exception& e) {
    throw TranscriptError(std::string("malformed transcripts file: ") + e.what());
  }
  return set;
}

const std::vector<TranscriptSet::Entry>* TranscriptSet::find(const std::string& problem,
                                                             const std::string& arm) const
{
  auto pit = scripts_.find(problem);
  if (pit == scripts_.end()) return nullptr;
  auto ait = pit->second.find(arm);
  if (ait != pit->second.end()) return &ait->second;
  // An arm without its own script reuses the planner's baseline conversation.
  const auto suffix = arm.rfind("+astwt");
  if (suffix != std::string::npos && suffix == arm.size() - 6) {
    ait = pit->second.find(arm.substr(0, suffix));
    if (ait != pit->second.end()) return &ait->second;
  }
  return nullptr;
}

bool TranscriptSet::has(const std::string& problem, const std::string& arm) const
{
  return find(problem, arm) != nullptr;
}

std::vector<llm::ScriptedBackend::Exchange> TranscriptSet::script(const std::string& problem,
                                                                  const std::string& arm) const
{
  const auto* entries = find(problem, arm);
  if (!entries)
    throw TranscriptError("no transcript for problem '" + problem + "' arm '" + arm + "'");
  std::vector<llm::ScriptedBackend::Exchange> script;
  script.reserve(entries->size());
  for (const auto& e : *entries) {
    llm::ScriptedBackend::Exchange ex;
    if (!e.match.empty()) ex.match = llm::contains(e.match);
    ex.reply = e.reply;
    script.push_back(std::move(ex));
  }
  return script;
}

std::vector<std::string> TranscriptSet::problems() const
{
  std::vector<std::string> ids;
  ids.reserve(scripts_.size());
  for (const auto& [prob, arms] : scripts_) {
    (void)arms;
    ids.push_back(prob);
  }
  return ids;
}

int SuiteReport::passed_count() const
{
  return static_cast<int>(
      std::count_if(problems.begin(), problems.end(), [](const auto& p) { return p.passed; }));
}

double SuiteReport::pass_rate() const
{
  if (problems.empty()) return 0.0;
  return static_cast<double>(passed_count()) / static_cast<double>(problems.size());
}

std::map<std::string, std::pair<int, int>> SuiteReport::category_rates() const
{
  std::map<std::string, std::pair<int, int>> rates;
  for (const auto& p : problems) {
    auto& [passed, total] = rates[p.category];
    ++total;
    if (p.passed) ++passed;
  }
  return rates;
}

std::string to_json(const SuiteReport& report)
{
  json problems = json::array();
  for (const auto& p : report.problems) problems.push_back(problem_json(p));
  json categories = json::object();
  for (const auto& [cat, counts] : report.category_rates())
    categories[cat] = {{"passed", counts.first}, {"total", counts.second}};
  json doc = {{"problems", std::move(problems)},
              {"passed", report.passed_count()},
              {"total", report.problems.size()},
              {"pass_rate", report.pass_rate()},
              {"categories", std::move(categories)}};
  return doc.dump(2);
}

std::string render_table(const SuiteReport& report)
{
  std::size_t id_w = 7, cat_w = 8, stop_w = 11;
  for (const auto& p : report.problems) {
    id_w = std::max(id_w, p.id.size());
    cat_w = std::max(cat_w, p.category.size());
    stop_w = std::max(stop_w, p.stop_reason.size());
  }
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(id_w) + 2) << "problem"
      << std::setw(static_cast<int>(cat_w) + 2) << "category" << std::setw(8) << "result"
      << std::setw(static_cast<int>(stop_w) + 2) << "stop reason" << std::right << std::setw(5)
      << "sim" << std::setw(7) << "astwt" << std::setw(8) << "syntax" << std::setw(9) << "secs"
      << "\n";
  for (const auto& p : report.problems) {
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.2f", p.wall_seconds);
    out << std::left << std::setw(static_cast<int>(id_w) + 2) << p.id
        << std::setw(static_cast<int>(cat_w) + 2) << p.category << std::setw(8)
        << (p.passed ? "pass" : "FAIL") << std::setw(static_cast<int>(stop_w) + 2) << p.stop_reason
        << std::right << std::setw(5) << p.simulate_calls << std::setw(7) << p.astwt_calls
        << std::setw(8) << p.syntax_calls << std::setw(9) << secs << "\n";
  }
  out << "passed " << report.passed_count() << "/" << report.problems.size() << " ("
      << pct(report.pass_rate()) << "%)\n";
  for (const auto& [cat, counts] : report.category_rates())
    out << "  " << cat << ": " << counts.first << "/" << counts.second << "\n";
  return out.str();
}

ProblemResult run_problem(const ProblemSpec& problem, const RunConfig& cfg)
{
  if (problem.id.empty() || blank(problem.spec_text) || blank(problem.testbench_source))
    throw ProblemLayoutError("problem needs an id, spec text, and a testbench");
  if (cfg.scripted_file.empty() && cfg.backend_url.empty())
    throw ConfigError("either a scripted transcript file or a backend URL is required");

  const std::string arm = arm_key(cfg);
  const fs::path out_dir = fs::path(cfg.out_dir) / problem.id / arm;
  fs::create_directories(out_dir);

  std::unique_ptr<llm::Backend> backend;
  if (!cfg.scripted_file.empty()) {
    const auto transcripts = TranscriptSet::load(cfg.scripted_file);
    backend = std::make_unique<llm::ScriptedBackend>(transcripts.script(problem.id, arm));
  } else {
    llm::BackendConfig bc;
    bc.endpoint = cfg.backend_url;
    bc.model = cfg.model;
    backend = std::make_unique<llm::HttpBackend>(std::move(bc));
  }

  const auto trace_path = (out_dir / "trace.jsonl").string();
  std::error_code ec;
  fs::remove(trace_path, ec);  // the log appends; a rerun starts from scratch
  agents::TraceLog log(trace_path, problem.id);

  agents::PipelineConfig pipeline_cfg;
  pipeline_cfg.use_tcrg = cfg.planner == "tcrg";
  pipeline_cfg.ast_wt = cfg.ast_wt;
  pipeline_cfg.workdir = (out_dir / "work").string();
  pipeline_cfg.sim.timeout_seconds = cfg.timeout_sim;

  ProblemResult result;
  result.id = problem.id;
  result.category = problem.category;

  const auto t0 = std::chrono::steady_clock::now();
  const auto outcome =
      agents::run_pipeline(problem.spec_text, problem.testbench_source, *backend, pipeline_cfg, &log);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  result.passed = outcome.passed;
  result.stop_reason = outcome.stop_reason;
  result.simulate_calls = outcome.simulate_calls;
  result.astwt_calls = outcome.astwt_calls;
  result.syntax_calls = outcome.syntax_calls;

  const auto save = [&](const char* name, const char* file, const std::string& content) {
    if (content.empty()) return;
    const auto path = out_dir / file;
    write_file(path, content);
    result.artifacts[name] = path.string();
  };
  save("final_source", "final.v", outcome.final_source);
  save("plan", "plan.json", outcome.plan_json);
  save("extraction", "extraction.json", outcome.extraction_json);
  save("graph", "tcrg.json", outcome.graph_json);
  result.artifacts["trace"] = trace_path;

  write_file(out_dir / "result.json", problem_json(result).dump(2) + "\n");
  return result;
}

SuiteReport run_suite(const std::string& problems_dir, const RunConfig& cfg)
{
  const auto dirs = problem_dirs(problems_dir);
  if (dirs.empty()) throw ConfigError("no problems found under '" + problems_dir + "'");

  std::vector<ProblemResult> results(dirs.size());
  std::atomic<std::size_t> next{0};
  std::mutex print_mu;
  std::mutex fatal_mu;
  std::exception_ptr fatal;

  const auto worker = [&]() {
    for (;;) {
      const auto i = next.fetch_add(1);
      if (i >= dirs.size()) return;
      {
        std::lock_guard lock(fatal_mu);
        if (fatal) return;  // a harness failure stops the suite, not just one problem
      }
      ProblemResult r;
      r.id = dirs[i].filename().string();
      try {
        r = run_problem(load_problem(dirs[i].string()), cfg);
      } catch (const ProblemLayoutError& e) {
        r.stop_reason = std::string("layout error: ") + e.what();
      } catch (const TranscriptError& e) {
        r.stop_reason = std::string("transcript error: ") + e.what();
      } catch (const llm::ScriptMismatch& e) {
        r.stop_reason = std::string("script mismatch: ") + e.what();
      } catch (...) {
        std::lock_guard lock(fatal_mu);
        if (!fatal) fatal = std::current_exception();
        return;
      }
      if (cfg.verbose) {
        std::lock_guard lock(print_mu);
        std::cerr << (r.passed ? "pass  " : "FAIL  ") << r.id << "  (" << r.stop_reason << ")\n";
      }
      results[i] = std::move(r);
    }
  };

  const int jobs = std::clamp(cfg.jobs, 1, static_cast<int>(dirs.size()));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (fatal) std::rethrow_exception(fatal);

  SuiteReport report;
  report.problems = std::move(results);
  return report;
}

AblationReport run_ablation(const std::string& problems_dir, const RunConfig& cfg)
{
  AblationReport report;
  for (const char* planner : {"simple", "tcrg"}) {
    for (const bool ast_wt : {false, true}) {
      RunConfig arm_cfg = cfg;
      arm_cfg.planner = planner;
      arm_cfg.ast_wt = ast_wt;
      report.arms[arm_key(arm_cfg)] = run_suite(problems_dir, arm_cfg);
    }
  }
  return report;
}

std::string to_json(const AblationReport& report)
{
  json arms = json::object();
  for (const auto& [arm, suite] : report.arms) arms[arm] = json::parse(to_json(suite));
  return json{{"arms", std::move(arms)}}.dump(2);
}

std::string render_grid(const AblationReport& report)
{
  static const std::vector<std::string> kArms = {"simple", "simple+astwt", "tcrg", "tcrg+astwt"};
  const auto rate = [&](const std::string& arm) -> std::string {
    auto it = report.arms.find(arm);
    return it == report.arms.end() ? "-" : pct(it->second.pass_rate());
  };
  std::ostringstream out;
  out << "pass rate (%)\n";
  out << std::left << std::setw(16) << "" << std::right << std::setw(16) << "without ast-wt"
      << std::setw(14) << "with ast-wt" << "\n";
  out << std::left << std::setw(16) << "simple planner" << std::right << std::setw(16)
      << rate("simple") << std::setw(14) << rate("simple+astwt") << "\n";
  out << std::left << std::setw(16) << "tcrg planner" << std::right << std::setw(16)
      << rate("tcrg") << std::setw(14) << rate("tcrg+astwt") << "\n";

  std::map<std::string, bool> categories;
  for (const auto& [arm, suite] : report.arms) {
    (void)arm;
    for (const auto& [cat, counts] : suite.category_rates()) {
      (void)counts;
      categories[cat] = true;
    }
  }
  if (!categories.empty()) {
    std::size_t cat_w = 8;
    for (const auto& [cat, seen] : categories) {
      (void)seen;
      cat_w = std::max(cat_w, cat.size());
    }
    out << "\nper category (passed/total)\n";
    out << std::left << std::setw(static_cast<int>(cat_w) + 2) << "category";
    for (const auto& arm : kArms) out << std::right << std::setw(14) << arm;
    out << "\n";
    for (const auto& [cat, seen] : categories) {
      (void)seen;
      out << std::left << std::setw(static_cast<int>(cat_w) + 2) << cat;
      for (const auto& arm : kArms) {
        std::string cell = "-";
        auto it = report.arms.find(arm);
        if (it != report.arms.end()) {
          const auto rates = it->second.category_rates();
          auto cit = rates.find(cat);
          if (cit != rates.end())
            cell = std::to_string(cit->second.first) + "/" + std::to_string(cit->second.second);
        }
        out << std::right << std::setw(14) << cell;
      }
      out << "\n";
    }
  }
  return out.str();
}

FixtureReport validate_fixtures(const std::string& problems_dir, const sim::SimulatorConfig& sim_cfg)
{
  FixtureReport report;
  const auto dirs = problem_dirs(problems_dir);
  if (dirs.empty()) {
    report.violations.push_back("no problems found under '" + problems_dir + "'");
    return report;
  }
  const fs::path scratch = fs::temp_directory_path() / "rtlagent-fixture-gate";

  for (const auto& dir : dirs) {
    const std::string id = dir.filename().string();
    ++report.problems;

    ProblemSpec problem;
    try {
      problem = load_problem(dir.string());
    } catch (const ProblemLayoutError& e) {
      report.violations.push_back(e.what());
      continue;
    }

    const auto golden = try_read(dir / "ref.v");
    if (!golden || blank(*golden)) {
      report.violations.push_back(id + ": missing ref.v (known-good implementation)");
      continue;
    }
    const auto golden_dir = scratch / id / "golden";
    std::error_code ec;
    fs::remove_all(golden_dir, ec);
    const auto golden_rep =
        sim::simulate(*golden, problem.testbench_source, golden_dir.string(), {}, sim_cfg);
    if (!golden_rep.compiled)
      report.violations.push_back(id + ": ref.v does not compile against tb.v");
    else if (golden_rep.timed_out)
      report.violations.push_back(id + ": ref.v simulation timed out");
    else if (!golden_rep.passed())
      report.violations.push_back(
          id + ": ref.v fails its own bench (mismatches=" +
          (golden_rep.mismatch_count ? std::to_string(*golden_rep.mismatch_count) : "unknown") + ")");

    const auto meta = try_read(dir / "meta.json");
    if (!meta) continue;
    json doc = json::parse(*meta, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      report.violations.push_back(id + ": meta.json is not a JSON object");
      continue;
    }
    if (!doc.contains("bugs")) continue;
    if (!doc.at("bugs").is_array()) {
      report.violations.push_back(id + ": meta.json bugs must be an array");
      continue;
    }
    for (const auto& bug : doc.at("bugs")) {
      ++report.bugs;
      std::string file;
      std::optional<std::uint64_t> documented_time;
      try {
        file = bug.at("file").get<std::string>();
        if (bug.contains("first_mismatch_time"))
          documented_time = bug.at("first_mismatch_time").get<std::uint64_t>();
      } catch (const json::exception& e) {
        report.violations.push_back(id + ": malformed bug entry: " + e.what());
        continue;
      }
      const auto source = try_read(dir / file);
      if (!source) {
        report.violations.push_back(id + ": missing bug file " + file);
        continue;
      }
      const auto bug_dir = scratch / id / ("bug-" + fs::path(file).stem().string());
      fs::remove_all(bug_dir, ec);
      const auto bug_rep =
          sim::simulate(*source, problem.testbench_source, bug_dir.string(), {}, sim_cfg);
      if (!bug_rep.compiled) {
        report.violations.push_back(id + ": bug " + file + " does not compile");
      } else if (bug_rep.timed_out) {
        report.violations.push_back(id + ": bug " + file + " simulation timed out");
      } else if (!bug_rep.mismatch_count || *bug_rep.mismatch_count == 0) {
        report.violations.push_back(id + ": bug " + file + " passes the bench (planted bug is inert)");
      } else if (documented_time &&
                 (!bug_rep.first_mismatch_time || *bug_rep.first_mismatch_time != *documented_time)) {
        report.violations.push_back(
            id + ": bug " + file + " first mismatch at " +
            (bug_rep.first_mismatch_time ? std::to_string(*bug_rep.first_mismatch_time) : "unknown") +
            ", documented " + std::to_string(*documented_time));
      }
    }
  }
  return report;
}

}  // namespace rtlagent::cli
