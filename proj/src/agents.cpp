#include "rtlagent/agents/agents.hpp"

#include <chrono>
#include <filesystem>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rtlagent/astwt/trace.hpp"
#include "rtlagent/vlog/parser.hpp"
#include "rtlagent/wave/vcd.hpp"

namespace rtlagent::agents {

using nlohmann::json;
namespace fs = std::filesystem;

TraceLog::TraceLog(const std::string& path, std::string problem_id)
    : problem_id_(std::move(problem_id))
{
  const fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  auto out = std::make_shared<std::ofstream>(path, std::ios::app);
  if (!*out)
    throw std::runtime_error("cannot open trace log '" + path + "'");
  out_ = std::move(out);
  mu_ = std::make_shared<std::mutex>();
}

void TraceLog::record(const std::string& kind, const std::string& payload_json)
{
  if (!out_)
    return;
  json data = json::parse(payload_json, nullptr, false);
  if (data.is_discarded())
    data = payload_json;  // keep malformed payloads verbatim rather than dropping them
  const auto ts = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::system_clock::now().time_since_epoch())
                      .count();
  const json line = {{"ts_ms", ts}, {"problem", problem_id_}, {"kind", kind},
                     {"data", std::move(data)}};
  const std::lock_guard<std::mutex> lock(*mu_);
  *out_ << line.dump() << '\n';
  out_->flush();
}

namespace {

const char* role_name(llm::Role role)
{
  switch (role) {
    case llm::Role::System: return "system";
    case llm::Role::User: return "user";
    case llm::Role::Assistant: return "assistant";
    case llm::Role::Tool: return "tool";
  }
  return "user";
}

// Logs every chat exchange under the calling agent's name; transparent
// otherwise.
class LoggingBackend final : public llm::Backend {
public:
  LoggingBackend(llm::Backend& inner, TraceLog* log, std::string agent)
      : inner_(inner), log_(log), agent_(std::move(agent))
  {
  }

  llm::ChatMessage chat(const std::vector<llm::ChatMessage>& messages) override
  {
    const auto reply = inner_.chat(messages);
    if (log_ && log_->enabled()) {
      std::string prompt;
      for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
        if (it->role == llm::Role::User || it->role == llm::Role::Tool) {
          prompt = it->content;
          break;
        }
      }
      const json rec = {{"agent", agent_}, {"prompt", prompt}, {"reply", reply.content}};
      log_->record("chat", rec.dump());
    }
    return reply;
  }

private:
  llm::Backend& inner_;
  TraceLog* log_;
  std::string agent_;
};

void persist_outcome(TraceLog* log, const std::string& agent, const AgentOutcome& out)
{
  if (!log || !log->enabled())
    return;
  json traces = json::array();
  for (const auto& t : out.traces)
    traces.push_back(json::parse(llm::to_json(t)));
  json transcript = json::array();
  for (const auto& m : out.transcript)
    transcript.push_back({{"role", role_name(m.role)}, {"content", m.content}});
  const json rec = {{"agent", agent},           {"ok", out.ok},
                    {"rounds", out.rounds},     {"artifact", out.artifact},
                    {"traces", std::move(traces)}, {"transcript", std::move(transcript)}};
  log->record("agent_outcome", rec.dump());
}

// One "tool" record per invocation, errors included; transparent when the
// log is off.
llm::ToolSpec logged_tool(TraceLog* log, const std::string& name, llm::ToolSpec spec)
{
  if (!log || !log->enabled())
    return spec;
  const auto inner = spec.invoke;
  spec.invoke = [log, name, inner](const std::string& input) {
    try {
      const auto observation = inner(input);
      const json rec = {{"tool", name}, {"input", input}, {"observation", observation}};
      log->record("tool", rec.dump());
      return observation;
    } catch (const std::exception& e) {
      const json rec = {{"tool", name}, {"input", input}, {"error", e.what()}};
      log->record("tool", rec.dump());
      throw;
    }
  };
  return spec;
}

bool approved(const std::string& text)
{
  const auto i = text.find_first_not_of(" \t\r\n");
  return i != std::string::npos && text.compare(i, 8, "APPROVED") == 0;
}

// First fenced block holding a module; else the first nonempty block.
std::optional<std::string> extract_module(const std::string& text)
{
  const auto blocks = llm::fenced_blocks(text);
  for (const auto& b : blocks)
    if (b.find("module") != std::string::npos && b.find("endmodule") != std::string::npos)
      return b;
  for (const auto& b : blocks)
    if (b.find_first_not_of(" \t\r\n") != std::string::npos)
      return b;
  return std::nullopt;
}

// simulate's action_input: a complete module (fenced or bare) replaces the
// current code; anything else keeps it.
std::optional<std::string> replacement_module(const std::string& input)
{
  std::string body = input;
  if (input.find("```") != std::string::npos) {
    const auto blocks = llm::fenced_blocks(input);
    if (!blocks.empty())
      body = blocks.front();
  }
  if (body.find("module") != std::string::npos && body.find("endmodule") != std::string::npos)
    return body;
  return std::nullopt;
}

std::string render_compile(const sim::CompileReport& rep)
{
  if (rep.ok)
    return "syntax OK";
  std::string out = "compile failed:";
  for (const auto& d : rep.diagnostics)
    out += "\n  line " + std::to_string(d.line) + ": " + d.severity + ": " + d.message;
  if (rep.diagnostics.empty())
    out += '\n' + rep.raw_output;
  return out;
}

std::string render_sim(const sim::SimReport& rep)
{
  if (!rep.compiled) {
    std::string out = "compile failed:";
    for (const auto& d : rep.diagnostics)
      out += "\n  line " + std::to_string(d.line) + ": " + d.severity + ": " + d.message;
    out += "\n[result] compiled=no";
    return out;
  }
  std::string out = rep.raw_stdout;
  while (!out.empty() && (out.back() == '\n' || out.back() == '\r' || out.back() == ' '))
    out.pop_back();
  if (!out.empty())
    out += '\n';
  out += "[result] compiled=yes";
  if (rep.timed_out)
    out += " timed_out=yes";
  out += " mismatches=";
  out += rep.mismatch_count ? std::to_string(*rep.mismatch_count) : std::string("unknown");
  if (rep.total_samples)
    out += " samples=" + std::to_string(*rep.total_samples);
  if (rep.first_mismatch_time)
    out += " first_mismatch_time=" + std::to_string(*rep.first_mismatch_time);
  return out;
}

int parse_k(const std::string& input)
{
  if (input.find_first_not_of(" \t\r\n") == std::string::npos)
    return 1;
  const json doc = json::parse(input, nullptr, false);
  if (doc.is_number_integer())
    return doc.get<int>();
  if (doc.is_object() && doc.contains("k") && doc.at("k").is_number_integer())
    return doc.at("k").get<int>();
  throw std::runtime_error("expected {\"k\": N} or a bare integer, got: " + input);
}

// The waveform-tracing tool closure body; returns observations, never
// throws for recoverable misuse.
std::string astwt_observation(const std::string& current_source,
                              const std::optional<sim::SimReport>& last,
                              const DebugConfig& cfg, const std::string& input)
{
  if (!last || !last->compiled)
    return "no waveform available; run simulate first.";
  if (!last->vcd_path)
    return "the last simulation produced no waveform dump.";

  std::set<std::string> signals;
  int level = 1;
  int before = 3;
  int after = 2;
  const json doc = json::parse(input, nullptr, false);
  if (doc.is_object()) {
    if (doc.contains("signals")) {
      const auto& s = doc.at("signals");
      if (s.is_array()) {
        for (const auto& v : s)
          if (v.is_string())
            signals.insert(v.get<std::string>());
      } else if (s.is_string()) {
        signals.insert(s.get<std::string>());
      }
    }
    if (doc.contains("level") && doc.at("level").is_number_integer())
      level = doc.at("level").get<int>();
    if (doc.contains("cycles_before") && doc.at("cycles_before").is_number_integer())
      before = doc.at("cycles_before").get<int>();
    if (doc.contains("cycles_after") && doc.at("cycles_after").is_number_integer())
      after = doc.at("cycles_after").get<int>();
  } else if (doc.is_array()) {
    for (const auto& v : doc)
      if (v.is_string())
        signals.insert(v.get<std::string>());
  } else if (doc.is_string()) {
    signals.insert(doc.get<std::string>());
  } else if (doc.is_discarded()) {
    const auto b = input.find_first_not_of(" \t\r\n");
    if (b != std::string::npos)
      signals.insert(input.substr(b, input.find_last_not_of(" \t\r\n") - b + 1));
  }
  if (signals.empty())
    return "usage: {\"signals\": [\"name\", ...], \"level\": N}";

  const auto parsed = vlog::parse_module(current_source);
  if (!parsed.ok() || !parsed.module)
    return "cannot trace: the current module does not parse: " +
           (parsed.diagnostics.empty() ? std::string("unknown error")
                                       : vlog::format_diagnostic(parsed.diagnostics.front()));

  std::ifstream in(*last->vcd_path, std::ios::binary);
  if (!in)
    return "cannot open waveform dump '" + *last->vcd_path + "'";
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto db = wave::parse_vcd(buf.str());

  astwt::TraceRequest req;
  req.mismatched_signals = std::move(signals);
  req.level = level;
  req.mismatch_time = last->first_mismatch_time.value_or(db.end_time);
  req.cycles_before = before;
  req.cycles_after = after;
  const auto report = astwt::trace(*parsed.module, db, req, cfg.clock, cfg.scope);
  return astwt::render_report(report);
}

void tally(PipelineResult& res, const AgentOutcome& out)
{
  for (const auto& trace : out.traces) {
    for (const auto& step : trace.steps) {
      if (step.action == "simulate")
        ++res.simulate_calls;
      else if (step.action == "ast_wt_trace")
        ++res.astwt_calls;
      else if (step.action == "check_syntax")
        ++res.syntax_calls;
    }
  }
}

}  // namespace

AgentOutcome run_high_level_planner(const std::string& spec_text, llm::Backend& backend,
                                    const Prompts& prompts, int round_budget, TraceLog* log)
{
  if (round_budget <= 0)
    throw std::invalid_argument("round_budget must be positive");

  LoggingBackend planner(backend, log, "planner");
  LoggingBackend critic(backend, log, "plan_critic");
  AgentOutcome out;

  std::vector<llm::ChatMessage> chat = {
      llm::system_msg(prompts.planner),
      llm::user_msg("Specification:\n" + spec_text + "\n\nWrite the task plan now."),
  };
  const llm::ChatMessage original = chat.back();
  out.transcript = chat;
  std::string last_draft;

  for (int round = 1; round <= round_budget; ++round) {
    out.rounds = round;
    chat = llm::trim_memory(chat, original);
    const auto reply = planner.chat(chat);
    chat.push_back(reply);
    out.transcript.push_back(reply);

    // Only schema/graph failures are recoverable here; protocol bugs
    // (e.g. a scripted backend running dry) must propagate.
    std::optional<std::string> canonical;
    std::string error = "no fenced code block found";
    for (const auto& block : llm::fenced_blocks(reply.content)) {
      try {
        const auto parsed = plan::parse_plan(block);
        plan::build_dag(parsed);
        canonical = plan::to_json(parsed);
        break;
      } catch (const plan::CycleError& e) {
        error = e.what();
      } catch (const plan::PlanFormatError& e) {
        error = e.what();
      } catch (const plan::PlanValidationError& e) {
        error = e.what();
      }
    }
    if (!canonical) {
      chat.push_back(llm::user_msg("The plan did not validate (" + error +
                                   "). Reply again with one fenced JSON array."));
      out.transcript.push_back(chat.back());
      continue;
    }
    last_draft = *canonical;

    // Stateless review: each draft is judged on its own.
    const std::vector<llm::ChatMessage> review = {
        llm::system_msg(prompts.plan_critic),
        llm::user_msg("Specification:\n" + spec_text + "\n\nDraft plan:\n" + *canonical +
                      "\n\nReview it."),
    };
    const auto verdict = critic.chat(review);
    out.transcript.push_back(verdict);
    if (approved(verdict.content)) {
      out.ok = true;
      out.artifact = *canonical;
      persist_outcome(log, "planner", out);
      return out;
    }
    chat.push_back(llm::user_msg("Reviewer feedback:\n" + verdict.content +
                                 "\n\nRevise the plan and reply with one fenced JSON array."));
    out.transcript.push_back(chat.back());
  }

  out.artifact = last_draft;
  persist_outcome(log, "planner", out);
  return out;
}

AgentOutcome run_extraction(const std::string& spec_text, llm::Backend& backend,
                            const Prompts& prompts, TraceLog* log)
{
  LoggingBackend traced(backend, log, "extraction");
  AgentOutcome out;

  std::vector<llm::ChatMessage> chat = {
      llm::system_msg(prompts.extraction),
      llm::user_msg("Specification:\n" + spec_text + "\n\nList the circuit details now."),
  };
  out.transcript = chat;
  std::string last_error = "no fenced code block found";

  for (int attempt = 1; attempt <= 2; ++attempt) {
    out.rounds = attempt;
    const auto reply = traced.chat(chat);
    chat.push_back(reply);
    out.transcript.push_back(reply);

    for (const auto& block : llm::fenced_blocks(reply.content)) {
      try {
        const auto doc = tcrg::parse_extraction(block);
        out.ok = true;
        out.artifact = tcrg::to_json(doc);
        persist_outcome(log, "extraction", out);
        return out;
      } catch (const tcrg::DocFormatError& e) {
        last_error = e.what();
      } catch (const tcrg::DanglingReference& e) {
        last_error = e.what();
      }
    }
    if (attempt == 1) {
      chat.push_back(llm::user_msg(
          "That did not validate (" + last_error +
          "). Reply again with exactly one fenced JSON object in the required schema."));
      out.transcript.push_back(chat.back());
    }
  }

  persist_outcome(log, "extraction", out);
  throw ExtractionInvalid(last_error);
}

AgentOutcome run_retrieval(const plan::TaskPlan& plan_in, const tcrg::Tcrg& graph,
                           llm::Backend& backend, const Prompts& prompts,
                           llm::ReactLimits limits, TraceLog* log)
{
  LoggingBackend traced(backend, log, "retrieval");
  AgentOutcome out;
  out.ok = true;

  plan::TaskPlan enriched = plan_in;
  for (auto& task : enriched.subtasks) {
    const std::string node_id = "task:" + task.id;
    llm::ToolRegistry tools;
    tools["khop"] = logged_tool(
        log, "khop",
        {"fetch the signals, transitions, and examples within k hops of this sub-task; "
         "action_input {\"k\": N}",
         [&graph, &node_id](const std::string& input) {
           const auto result = tcrg::khop(graph, node_id, parse_k(input));
           if (result.signals.empty() && result.transitions.empty() && result.examples.empty())
             return std::string("no circuit details");
           return tcrg::render_context(result);
         }});

    const auto trace = llm::react_loop(
        prompts.retrieval, "Sub-task " + task.id + ": " + task.description, tools, traced,
        limits);
    out.traces.push_back(trace);
    ++out.rounds;
    if (trace.stop_reason == llm::StopReason::Final && trace.final_answer)
      task.context = *trace.final_answer;
    else
      out.ok = false;  // budget miss leaves the sub-task unenriched
  }

  out.artifact = plan::to_json(enriched);
  persist_outcome(log, "retrieval", out);
  return out;
}

AgentOutcome run_code_agent(const plan::Subtask& subtask, const std::string& current_source,
                            llm::Backend& backend, const SyntaxChecker& check_syntax,
                            const Prompts& prompts, int round_budget,
                            llm::ReactLimits verify_limits, TraceLog* log)
{
  if (subtask.id.empty() || subtask.description.empty())
    throw plan::PlanValidationError("code agent needs a sub-task with an id and a description");
  if (!check_syntax)
    throw std::invalid_argument("check_syntax must be callable");
  if (round_budget <= 0)
    throw std::invalid_argument("round_budget must be positive");

  LoggingBackend engineer(backend, log, "engineer");
  LoggingBackend critic(backend, log, "code_critic");
  AgentOutcome out;

  std::string query = "Sub-task " + subtask.id + ": " + subtask.description + "\n";
  if (!subtask.context.empty())
    query += "Circuit details:\n" + subtask.context + "\n";
  if (current_source.empty())
    query += "No code exists yet.\n";
  else
    query += "Current module source:\n```verilog\n" + current_source + "\n```\n";
  query += "Reply with the complete updated module source in one fenced code block.";

  std::vector<llm::ChatMessage> chat = {llm::system_msg(prompts.engineer),
                                        llm::user_msg(query)};
  const llm::ChatMessage original = chat.back();
  out.transcript = chat;
  std::string last_draft = current_source;

  for (int round = 1; round <= round_budget; ++round) {
    out.rounds = round;
    chat = llm::trim_memory(chat, original);
    const auto reply = engineer.chat(chat);
    chat.push_back(reply);
    out.transcript.push_back(reply);

    const auto draft = extract_module(reply.content);
    if (!draft) {
      chat.push_back(
          llm::user_msg("Reply with the complete module source in one fenced code block."));
      out.transcript.push_back(chat.back());
      continue;
    }
    last_draft = *draft;

    // Fresh reviewer loop per draft, its syntax tool bound to this draft.
    llm::ToolRegistry vtools;
    vtools["check_syntax"] = logged_tool(
        log, "check_syntax",
        {"compile the engineer's current draft; action_input is ignored",
         [&check_syntax, &draft](const std::string&) -> std::string {
           try {
             const auto res = check_syntax(*draft);
             if (!res.detail.empty())
               return res.detail;
             return res.ok ? "syntax OK" : "compile failed";
           } catch (const sim::ToolUnavailable& e) {
             throw llm::ToolFatal(e.what());
           }
         }});
    const auto vtrace = llm::react_loop(
        prompts.code_critic,
        "Sub-task " + subtask.id + ": " + subtask.description + "\n\nDraft:\n```verilog\n" +
            *draft + "\n```",
        vtools, critic, verify_limits);
    out.traces.push_back(vtrace);
    if (vtrace.stop_reason == llm::StopReason::ToolFatal) {
      persist_outcome(log, "code_agent", out);
      throw sim::ToolUnavailable(vtrace.steps.empty() ? "syntax checker unavailable"
                                                      : vtrace.steps.back().observation);
    }

    const std::string verdict = vtrace.final_answer.value_or("");
    if (vtrace.stop_reason == llm::StopReason::Final && approved(verdict)) {
      // The reviewer's word alone doesn't ship code: the harness recompiles.
      const auto gate = check_syntax(*draft);
      if (gate.ok) {
        out.ok = true;
        out.artifact = *draft;
        persist_outcome(log, "code_agent", out);
        return out;
      }
      chat.push_back(llm::user_msg("The draft does not compile:\n" + gate.detail +
                                   "\nFix it and reply with the complete module source."));
      out.transcript.push_back(chat.back());
      continue;
    }
    chat.push_back(llm::user_msg(
        "Verifier feedback:\n" +
        (verdict.empty() ? std::string("the reviewer did not reach a verdict") : verdict) +
        "\n\nRevise and reply with the complete module source."));
    out.transcript.push_back(chat.back());
  }

  out.artifact = last_draft;
  persist_outcome(log, "code_agent", out);
  return out;
}

AgentOutcome run_debug_agent(const std::string& module_source, const std::string& testbench,
                             llm::Backend& backend, const DebugConfig& cfg,
                             const Prompts& prompts, TraceLog* log)
{
  if (cfg.workdir.empty())
    throw std::invalid_argument("DebugConfig::workdir must be set");

  LoggingBackend traced(backend, log, "debug");
  AgentOutcome out;
  std::string current = module_source;
  std::optional<sim::SimReport> last;

  llm::ToolRegistry tools;
  tools["simulate"] = logged_tool(
      log, "simulate",
      {"compile and run the testbench; pass a complete replacement module to change the code "
       "first, or an empty input to run the current code",
       [&current, &last, &testbench, &cfg](const std::string& input) {
         if (const auto repl = replacement_module(input))
           current = *repl;
         try {
           last = sim::simulate(current, testbench, cfg.workdir, cfg.rules, cfg.sim);
         } catch (const sim::ToolUnavailable& e) {
           throw llm::ToolFatal(e.what());
         }
         return render_sim(*last);
       }});
  if (cfg.ast_wt)
    tools["ast_wt_trace"] = logged_tool(
        log, "ast_wt_trace",
        {"show the statements driving the given signals plus a waveform table around the "
         "first mismatch; action_input {\"signals\": [names], \"level\": N}",
         [&current, &last, &cfg](const std::string& input) {
           return astwt_observation(current, last, cfg, input);
         }});

  const std::string query =
      "Current module:\n```verilog\n" + current +
      "\n```\nVerify it with the simulate tool and fix functional mismatches until the "
      "testbench reports zero.";
  const auto trace = llm::react_loop(prompts.debug, query, tools, traced, cfg.limits);
  out.traces.push_back(trace);
  out.rounds = static_cast<int>(trace.steps.size());
  out.artifact = current;

  if (trace.stop_reason == llm::StopReason::ToolFatal) {
    persist_outcome(log, "debug", out);
    throw sim::ToolUnavailable(trace.steps.empty() ? "simulator unavailable"
                                                   : trace.steps.back().observation);
  }

  // Edits only flow through simulate, so "the last run passed" is exactly
  // "the final code passed".
  out.ok = last && last->passed() && !last->timed_out;
  persist_outcome(log, "debug", out);
  return out;
}

PipelineResult run_pipeline(const std::string& spec_text, const std::string& testbench,
                            llm::Backend& backend, const PipelineConfig& cfg, TraceLog* log)
{
  if (cfg.workdir.empty())
    throw std::invalid_argument("PipelineConfig::workdir must be set");
  fs::create_directories(cfg.workdir);

  PipelineResult res;

  const auto planned =
      run_high_level_planner(spec_text, backend, cfg.prompts, cfg.planner_rounds, log);
  res.plan_json = planned.artifact;
  if (!planned.ok) {
    res.stop_reason = "planner_budget";
    return res;
  }
  plan::TaskPlan the_plan = plan::parse_plan(planned.artifact);

  if (cfg.use_tcrg) {
    AgentOutcome extraction;
    try {
      extraction = run_extraction(spec_text, backend, cfg.prompts, log);
    } catch (const ExtractionInvalid&) {
      res.stop_reason = "extraction_invalid";
      return res;
    }
    res.extraction_json = extraction.artifact;
    const auto doc = tcrg::parse_extraction(extraction.artifact);
    const auto graph = tcrg::build_graph(the_plan, doc);
    res.graph_json = tcrg::to_json(graph);

    const auto retrieved =
        run_retrieval(the_plan, graph, backend, cfg.prompts, cfg.react_limits, log);
    tally(res, retrieved);
    the_plan = plan::parse_plan(retrieved.artifact);
    res.plan_json = retrieved.artifact;
  }

  auto dag = plan::build_dag(the_plan);
  std::string source;
  while (true) {
    const auto ready = dag.next_ready();
    if (ready.empty())
      break;
    // Plan order, not set order, decides the next task.
    std::string pick;
    for (const auto& node : dag.nodes) {
      if (ready.count(node.id)) {
        pick = node.id;
        break;
      }
    }
    const auto& task = dag.node(pick);
    dag.mark_running(pick);

    AgentOutcome step;
    if (task.kind == plan::TaskKind::Write) {
      const std::string syntax_dir = cfg.workdir + "/syntax";
      const SyntaxChecker checker = [&syntax_dir, &cfg](const std::string& src) {
        const auto rep = sim::check_syntax(src, syntax_dir, cfg.sim);
        return SyntaxCheck{rep.ok, render_compile(rep)};
      };
      step = run_code_agent(task, source, backend, checker, cfg.prompts, cfg.code_rounds,
                            cfg.react_limits, log);
    } else {
      DebugConfig dcfg;
      dcfg.workdir = cfg.workdir + "/sim";
      dcfg.ast_wt = cfg.ast_wt;
      dcfg.clock = cfg.clock;
      dcfg.scope = cfg.scope;
      dcfg.rules = cfg.rules;
      dcfg.sim = cfg.sim;
      dcfg.limits = cfg.react_limits;
      step = run_debug_agent(source, testbench, backend, dcfg, cfg.prompts, log);
    }
    tally(res, step);

    if (!step.ok) {
      dag.mark_failed(pick);
      res.final_source = step.artifact.empty() ? source : step.artifact;
      res.stop_reason = "task " + pick + " failed";
      return res;
    }
    source = step.artifact;
    dag.mark_done(pick);
  }

  res.final_source = source;
  res.passed =
      independent_recheck(source, testbench, cfg.workdir + "/recheck", cfg.rules, cfg.sim);
  res.stop_reason = res.passed ? "ok" : "recheck_mismatch";
  return res;
}

bool independent_recheck(const std::string& final_source, const std::string& testbench,
                         const std::string& workdir, const sim::MismatchRules& rules,
                         const sim::SimulatorConfig& sim_cfg)
{
  std::error_code ec;
  fs::remove_all(workdir, ec);  // nothing from earlier runs may leak into the verdict
  const auto rep = sim::simulate(final_source, testbench, workdir, rules, sim_cfg);
  return rep.passed() && !rep.timed_out;
}

}  // namespace rtlagent::agents
