#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "restcheck/error.hpp"
#include "restcheck/llm/prompt.hpp"

namespace restcheck::llm {

struct LlmConfig {
  std::string profile = "default";
  std::string endpoint_url;
  std::string model_name;
  double temperature = 0.6;
  std::optional<int> max_tokens;  // nullopt = unlimited, field omitted
  double timeout_seconds = 120.0;
  int retry_count = 2;
  int parallelism = 4;
  std::string api_key;  // only ever filled from the environment

  /// Throws Error(invalid_config) when a field is out of range.
  void validate() const;

  /// Named sampling profiles: "gpt-4o" (temperature 0.6) and
  /// "deepseek" (temperature 0.0), both without a max_tokens limit.
  static LlmConfig profile_named(std::string_view name);

  /// Reads the keys endpoint-url, model-name, temperature, max-tokens,
  /// timeout-seconds, retry-count, parallelism and an optional profile.
  /// The credential comes from `api_key_env` in the environment.
  static LlmConfig from_json(const Json& config, const char* api_key_env = "RESTCHECK_LLM_API_KEY");
  Json to_json() const;  // never includes the credential
};

struct Completion {
  std::string text;
  std::string model_name;
  std::int64_t latency_ms = 0;
  std::optional<int> prompt_tokens;
  std::optional<int> completion_tokens;
  int attempts = 1;
};

/// Transport-level failure. `transient` failures are retried by the gateway.
class TransportError : public std::runtime_error {
 public:
  enum class Kind { timeout, connect, http_status, empty_body, unmatched, other };

  TransportError(Kind kind, const std::string& message, int http_status = 0)
      : std::runtime_error(message), kind_(kind), http_status_(http_status) {}

  Kind kind() const noexcept { return kind_; }
  int http_status() const noexcept { return http_status_; }
  bool transient() const noexcept;

 private:
  Kind kind_;
  int http_status_;
};

/// One request/response exchange with a model endpoint.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual Completion send(const DualRolePrompt& prompt, const LlmConfig& config) = 0;
};

/// Request body for the chat-completion wire protocol:
/// {model, messages:[{role:"system",content},{role:"user",content}], temperature, max_tokens?}
Json chat_request_body(const DualRolePrompt& prompt, const LlmConfig& config);

/// Extracts choices[0].message.content (and usage) from a response body.
Completion parse_chat_response(std::string_view body, std::string_view fallback_model);

class HttpChatTransport : public ChatTransport {
 public:
  Completion send(const DualRolePrompt& prompt, const LlmConfig& config) override;
};

/// Audit record written for every exchange, before callers parse anything.
struct CompletionRecord {
  std::string id;
  std::string template_name;
  std::string prompt_hash;
  std::string system_message;
  std::string user_message;
  std::string text;
  std::string model_name;
  std::int64_t latency_ms = 0;
  int attempts = 0;

  bool operator==(const CompletionRecord&) const = default;
};

CompletionRecord make_record(const DualRolePrompt& prompt, const Completion& completion);

using CompletionSink = std::function<void(const CompletionRecord&)>;

/// Sends prompts through a transport with retry and a parallelism bound.
/// Thread-safe; concurrent complete() calls beyond `parallelism` block.
class LlmGateway {
 public:
  LlmGateway(LlmConfig config, std::shared_ptr<ChatTransport> transport);

  /// Retries transient transport failures up to retry_count times with the
  /// same payload. Throws Error with llm_timeout, llm_http_status,
  /// llm_empty_response, llm_transport or llm_unmatched.
  Completion complete(const DualRolePrompt& prompt);

  void set_sink(CompletionSink sink);
  const LlmConfig& config() const noexcept { return config_; }

 private:
  LlmConfig config_;
  std::shared_ptr<ChatTransport> transport_;
  CompletionSink sink_;
  std::mutex mutex_;
  std::condition_variable slots_cv_;
  int in_flight_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace restcheck::llm
