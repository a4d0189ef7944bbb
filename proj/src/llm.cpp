#include "rtlagent/llm/llm.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace rtlagent::llm {

using nlohmann::json;

namespace {

void require_well_formed(const std::vector<ChatMessage>& messages)
{
  if (messages.empty() || messages.front().role != Role::System)
    throw std::invalid_argument("chat needs a nonempty message list starting with system");
  for (const auto& m : messages)
    if (m.role == Role::Tool && m.tool_name.empty())
      throw std::invalid_argument("tool message without tool_name");
}

}  // namespace

ChatMessage HttpBackend::chat(const std::vector<ChatMessage>& messages)
{
  require_well_formed(messages);

  json body;
  body["model"] = cfg_.model;
  body["temperature"] = cfg_.temperature;
  body["top_p"] = cfg_.top_p;
  auto& arr = body["messages"] = json::array();
  for (const auto& m : messages) {
    switch (m.role) {
      case Role::System: arr.push_back({{"role", "system"}, {"content", m.content}}); break;
      case Role::User: arr.push_back({{"role", "user"}, {"content", m.content}}); break;
      case Role::Assistant:
        arr.push_back({{"role", "assistant"}, {"content", m.content}});
        break;
      case Role::Tool:
        // no tool-call ids in this protocol; fold into a user turn
        arr.push_back({{"role", "user"},
                       {"content", "[" + m.tool_name + " output]\n" + m.content}});
        break;
    }
  }
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key && *key)
    headers.emplace("Authorization", std::string("Bearer ") + key);

  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(
          std::chrono::milliseconds(cfg_.backoff_base_ms << (attempt - 1)));

    httplib::Client client(cfg_.endpoint);
    client.set_connection_timeout(cfg_.timeout);
    client.set_read_timeout(cfg_.timeout);
    client.set_write_timeout(cfg_.timeout);

    if (logger_)
      logger_("request", payload);
    ++requests_made_;
    auto res = client.Post(cfg_.path, headers, payload, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      if (logger_)
        logger_("error", last_error);
      continue;
    }
    if (res->status == 200) {
      if (logger_)
        logger_("response", res->body);
      try {
        auto doc = json::parse(res->body);
        return assistant_msg(
            doc.at("choices").at(0).at("message").at("content").get<std::string>());
      } catch (const json::exception&) {
        throw BackendRejected(res->status, res->body);
      }
    }
    const bool retryable = res->status == 408 || res->status == 429 || res->status >= 500;
    if (!retryable) {
      if (logger_)
        logger_("error", res->body);
      throw BackendRejected(res->status, res->body);
    }
    last_error = "status " + std::to_string(res->status);
    if (logger_)
      logger_("error", last_error + ": " + res->body);
  }
  throw BackendUnavailable("backend unreachable after " + std::to_string(cfg_.max_retries + 1) +
                           " attempts; last error: " + last_error);
}

ChatMessage ScriptedBackend::chat(const std::vector<ChatMessage>& messages)
{
  require_well_formed(messages);
  std::string prompt;
  for (auto it = messages.rbegin(); it != messages.rend(); ++it)
    if (it->role == Role::User || it->role == Role::Tool) {
      prompt = it->content;
      break;
    }
  if (next_ >= script_.size())
    throw ScriptMismatch("script exhausted after " + std::to_string(script_.size()) +
                         " replies; next prompt was: " + prompt);
  const auto& entry = script_[next_];
  if (entry.match && !entry.match(prompt))
    throw ScriptMismatch("script entry " + std::to_string(next_) +
                         " rejected the prompt: " + prompt);
  ++next_;
  return assistant_msg(entry.reply);
}

std::function<bool(const std::string&)> contains(std::string needle)
{
  return [needle = std::move(needle)](const std::string& s) {
    return s.find(needle) != std::string::npos;
  };
}

std::vector<ChatMessage> trim_memory(const std::vector<ChatMessage>& history,
                                     const ChatMessage& original_query)
{
  std::vector<ChatMessage> out;
  for (const auto& m : history)
    if (m.role == Role::System) {
      out.push_back(m);
      break;
    }
  std::vector<ChatMessage> tail;
  for (auto it = history.rbegin(); it != history.rend() && tail.size() < 4; ++it)
    if (it->role != Role::System)
      tail.push_back(*it);
  std::reverse(tail.begin(), tail.end());
  if (std::find(tail.begin(), tail.end(), original_query) == tail.end())
    out.push_back(original_query);
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

std::string to_string(StopReason reason)
{
  switch (reason) {
    case StopReason::Final: return "final";
    case StopReason::StepBudget: return "step_budget";
    case StopReason::ReplyBudget: return "reply_budget";
    case StopReason::ToolFatal: return "tool_fatal";
  }
  return "?";
}

std::string to_json(const ReactTrace& trace)
{
  json out;
  out["steps"] = json::array();
  for (const auto& s : trace.steps)
    out["steps"].push_back({{"thought", s.thought},
                            {"action", s.action},
                            {"action_input", s.action_input},
                            {"observation", s.observation}});
  if (trace.final_answer)
    out["final_answer"] = *trace.final_answer;
  else
    out["final_answer"] = nullptr;
  out["stop_reason"] = to_string(trace.stop_reason);
  return out.dump(2);
}

ReactTrace parse_trace(const std::string& json_text)
{
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("trace is not valid JSON: ") + e.what());
  }
  ReactTrace trace;
  for (const auto& s : doc.at("steps"))
    trace.steps.push_back({s.value("thought", std::string()), s.value("action", std::string()),
                           s.value("action_input", std::string()),
                           s.value("observation", std::string())});
  if (doc.contains("final_answer") && !doc.at("final_answer").is_null())
    trace.final_answer = doc.at("final_answer").get<std::string>();
  const auto reason = doc.value("stop_reason", std::string("final"));
  if (reason == "final")
    trace.stop_reason = StopReason::Final;
  else if (reason == "step_budget")
    trace.stop_reason = StopReason::StepBudget;
  else if (reason == "reply_budget")
    trace.stop_reason = StopReason::ReplyBudget;
  else if (reason == "tool_fatal")
    trace.stop_reason = StopReason::ToolFatal;
  else
    throw std::runtime_error("unknown stop_reason '" + reason + "'");
  return trace;
}

namespace {

bool fence_tag_char(char c)
{
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '_' || c == '+' || c == '-';
}

}  // namespace

std::vector<std::string> fenced_blocks(const std::string& text)
{
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = text.find("```", pos)) != std::string::npos) {
    std::size_t inner = pos + 3;
    const std::size_t line_end = text.find('\n', inner);
    if (line_end != std::string::npos) {
      const std::string tag = text.substr(inner, line_end - inner);
      if (std::all_of(tag.begin(), tag.end(), fence_tag_char))
        inner = line_end + 1;
    }
    const std::size_t close = text.find("```", inner);
    if (close == std::string::npos)
      break;  // an unterminated fence ends the scan
    out.push_back(text.substr(inner, close - inner));
    pos = close + 3;
  }
  return out;
}

namespace {

struct ParsedAction {
  std::string thought;
  std::string action;
  std::string input;
};

// Every ``` fence in the reply, tried in order; the first whose body is a
// JSON object with an "action" key wins.
std::optional<ParsedAction> parse_action(const std::string& reply, std::string& error)
{
  const auto blocks = fenced_blocks(reply);
  error = blocks.empty()
              ? "no complete fenced code block found"
              : "no fenced block holds a JSON object with a string \"action\"";
  for (const auto& body : blocks) {
    json doc = json::parse(body, nullptr, false);
    if (!doc.is_object() || !doc.contains("action") || !doc.at("action").is_string())
      continue;
    ParsedAction out;
    out.action = doc.at("action").get<std::string>();
    out.thought = doc.value("thought", std::string());
    if (doc.contains("action_input")) {
      const auto& input = doc.at("action_input");
      out.input = input.is_string() ? input.get<std::string>() : input.dump();
    }
    if (!out.action.empty())
      return out;
  }
  return std::nullopt;
}

std::string format_reminder(const std::string& error, const ToolRegistry& tools)
{
  std::string out = "Could not parse that reply (" + error +
                    "). Answer with exactly one fenced code block holding a single JSON "
                    "object:\n```json\n{\"thought\": \"...\", \"action\": \"<tool name or "
                    "FINAL>\", \"action_input\": \"...\"}\n```\n";
  if (!tools.empty()) {
    out += "Available tools:\n";
    for (const auto& [name, spec] : tools)
      out += "  " + name + ": " + spec.description + "\n";
  }
  return out;
}

std::string tool_names(const ToolRegistry& tools)
{
  std::string out;
  for (const auto& [name, spec] : tools) {
    if (!out.empty())
      out += ", ";
    out += name;
  }
  return out;
}

// The invariant react_loop promises about every outgoing message list.
void assert_trimmed(const std::vector<ChatMessage>& trimmed, const ChatMessage& original)
{
  if (trimmed.empty() || trimmed.front().role != Role::System)
    throw std::logic_error("trimmed history lost the system message");
  std::size_t non_system = 0;
  for (const auto& m : trimmed)
    non_system += m.role != Role::System;
  if (non_system > 5)  // original query + four recent
    throw std::logic_error("trimmed history exceeds the memory window");
  if (std::find(trimmed.begin(), trimmed.end(), original) == trimmed.end())
    throw std::logic_error("trimmed history lost the original query");
}

}  // namespace

ReactTrace react_loop(const std::string& system_prompt, const std::string& query,
                      const ToolRegistry& tools, Backend& backend, ReactLimits limits)
{
  if (limits.max_steps <= 0 || limits.max_consecutive_replies <= 0)
    throw std::invalid_argument("react_loop limits must be positive");

  std::vector<ChatMessage> history{system_msg(system_prompt), user_msg(query)};
  const ChatMessage original = history.back();

  ReactTrace trace;
  int replies = 0;
  int parse_failures = 0;
  for (;;) {
    if (replies >= limits.max_consecutive_replies) {
      trace.stop_reason = StopReason::ReplyBudget;
      break;
    }
    const auto trimmed = trim_memory(history, original);
    assert_trimmed(trimmed, original);
    const ChatMessage reply = backend.chat(trimmed);
    ++replies;
    history.push_back(reply);

    std::string error;
    const auto parsed = parse_action(reply.content, error);
    if (!parsed) {
      if (++parse_failures >= 3) {
        trace.stop_reason = StopReason::ReplyBudget;
        break;
      }
      history.push_back(user_msg(format_reminder(error, tools)));
      continue;
    }
    parse_failures = 0;

    if (parsed->action == "FINAL") {
      trace.steps.push_back({parsed->thought, "FINAL", parsed->input, ""});
      trace.final_answer = parsed->input;
      trace.stop_reason = StopReason::Final;
      break;
    }

    std::string observation;
    const auto it = tools.find(parsed->action);
    if (it == tools.end()) {
      observation = "unknown tool '" + parsed->action + "', available: " + tool_names(tools);
    } else {
      try {
        observation = it->second.invoke(parsed->input);
      } catch (const ToolFatal& e) {
        trace.steps.push_back({parsed->thought, parsed->action, parsed->input, e.what()});
        trace.stop_reason = StopReason::ToolFatal;
        return trace;
      } catch (const std::exception& e) {
        observation = std::string("tool error: ") + e.what();
      }
    }
    if (observation.empty())
      observation = "(no output)";
    trace.steps.push_back({parsed->thought, parsed->action, parsed->input, observation});
    if (static_cast<int>(trace.steps.size()) >= limits.max_steps) {
      trace.stop_reason = StopReason::StepBudget;
      break;
    }
    history.push_back(tool_msg(parsed->action, observation));
  }
  return trace;
}

}  // namespace rtlagent::llm
