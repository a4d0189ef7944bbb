#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtlagent::llm {

enum class Role { System, User, Assistant, Tool };

struct ChatMessage {
  Role role = Role::User;
  std::string content;
  std::string tool_name;  // set iff role == Tool

  bool operator==(const ChatMessage&) const = default;
};

inline ChatMessage system_msg(std::string text) { return {Role::System, std::move(text), {}}; }
inline ChatMessage user_msg(std::string text) { return {Role::User, std::move(text), {}}; }
inline ChatMessage assistant_msg(std::string text)
{
  return {Role::Assistant, std::move(text), {}};
}
inline ChatMessage tool_msg(std::string tool, std::string text)
{
  return {Role::Tool, std::move(text), std::move(tool)};
}

struct BackendConfig {
  std::string endpoint = "http://127.0.0.1:8000";
  std::string path = "/v1/chat/completions";
  std::string model = "default";
  double temperature = 0.1;
  double top_p = 1.0;
  std::chrono::milliseconds timeout{120000};
  int max_retries = 3;
  int backoff_base_ms = 250;  // doubled per retry
  std::string api_key_env = "RTLAGENT_API_KEY";
};

struct BackendUnavailable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-retryable HTTP status; carries the response body.
struct BackendRejected : std::runtime_error {
  BackendRejected(int status_, const std::string& body_)
      : std::runtime_error("backend rejected request (status " + std::to_string(status_) +
                           "): " + body_),
        status(status_),
        body(body_)
  {
  }
  int status;
  std::string body;
};

class Backend {
public:
  virtual ~Backend() = default;
  /// messages must be nonempty and start with a system message.
  virtual ChatMessage chat(const std::vector<ChatMessage>& messages) = 0;
};

/// Chat-completions over HTTP. Tool messages are folded into user role
/// (the wire protocol's tool role needs call ids we don't use). Retries
/// 408/429/5xx and transport failures with exponential backoff; other
/// failing statuses raise BackendRejected.
class HttpBackend : public Backend {
public:
  explicit HttpBackend(BackendConfig cfg) : cfg_(std::move(cfg)) {}
  ChatMessage chat(const std::vector<ChatMessage>& messages) override;

  /// Mirrors every request/response body when set ("request"/"response"/"error", payload).
  void set_logger(std::function<void(const std::string&, const std::string&)> logger)
  {
    logger_ = std::move(logger);
  }
  int requests_made() const { return requests_made_.load(); }

private:
  BackendConfig cfg_;
  std::function<void(const std::string&, const std::string&)> logger_;
  std::atomic<int> requests_made_{0};
};

/// Raised by ScriptedBackend when the conversation deviates from the
/// script — offline tests must fail loudly, never improvise.
struct ScriptMismatch : std::logic_error {
  using std::logic_error::logic_error;
};

/// Deterministic offline backend: an ordered script of (predicate over the
/// last user/tool message, canned reply). Each call consumes the next
/// entry; a prompt the entry's predicate rejects — or a call past the end —
/// is a ScriptMismatch.
class ScriptedBackend : public Backend {
public:
  struct Exchange {
    std::function<bool(const std::string&)> match;  // empty = match anything
    std::string reply;
  };

  explicit ScriptedBackend(std::vector<Exchange> script) : script_(std::move(script)) {}
  ChatMessage chat(const std::vector<ChatMessage>& messages) override;

  std::size_t consumed() const { return next_; }
  bool exhausted() const { return next_ == script_.size(); }

private:
  std::vector<Exchange> script_;
  std::size_t next_ = 0;
};

/// Predicate factory: case-sensitive substring match.
std::function<bool(const std::string&)> contains(std::string needle);

/// Bodies of every complete ``` fence in the text, in order; a language
/// tag on the opening line is skipped.
std::vector<std::string> fenced_blocks(const std::string& text);

/// Sliding-window memory: the system message, the original query, then the
/// most recent four non-system messages (the query is not duplicated when
/// it is already among them).
std::vector<ChatMessage> trim_memory(const std::vector<ChatMessage>& history,
                                     const ChatMessage& original_query);

/// Thrown by a tool to abort the whole loop (e.g. required binary missing).
/// Anything else a tool throws becomes an observation and the loop goes on.
struct ToolFatal : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ToolSpec {
  std::string description;
  std::function<std::string(const std::string&)> invoke;
};
using ToolRegistry = std::map<std::string, ToolSpec>;

struct ReactStep {
  std::string thought;
  std::string action;  // tool name or "FINAL"
  std::string action_input;
  std::string observation;  // empty only on the FINAL step

  bool operator==(const ReactStep&) const = default;
};

enum class StopReason { Final, StepBudget, ReplyBudget, ToolFatal };

std::string to_string(StopReason reason);

struct ReactTrace {
  std::vector<ReactStep> steps;
  std::optional<std::string> final_answer;
  StopReason stop_reason = StopReason::Final;

  bool operator==(const ReactTrace&) const = default;
};

std::string to_json(const ReactTrace& trace);
ReactTrace parse_trace(const std::string& json_text);

struct ReactLimits {
  int max_steps = 40;
  int max_consecutive_replies = 100;
};

/// Thought–Action–Observation driver. The assistant must answer with a
/// fenced JSON object {"thought", "action", "action_input"}; action FINAL
/// ends the loop with action_input as the answer. Unparseable replies get
/// a format-reminder observation; three in a row stop the loop. History is
/// trimmed via trim_memory before every backend call.
ReactTrace react_loop(const std::string& system_prompt, const std::string& query,
                      const ToolRegistry& tools, Backend& backend, ReactLimits limits = {});

}  // namespace rtlagent::llm
