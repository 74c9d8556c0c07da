#include "restcheck/llm/gateway.hpp"

#include <cstdlib>
#include <thread>

#include "net/http_client.hpp"

namespace restcheck::llm {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::invalid_config, what); }

Error to_error(const TransportError& e, int attempts) {
  Json details{{"attempts", attempts}};
  switch (e.kind()) {
    case TransportError::Kind::timeout:
      return Error(ErrorCode::llm_timeout,
                   "model endpoint timed out after " + std::to_string(attempts) + " attempt(s): " + e.what(), details);
    case TransportError::Kind::http_status:
      details["status"] = e.http_status();
      return Error(ErrorCode::llm_http_status, e.what(), details);
    case TransportError::Kind::empty_body:
      return Error(ErrorCode::llm_empty_response, e.what(), details);
    case TransportError::Kind::unmatched:
      return Error(ErrorCode::llm_unmatched, e.what(), details);
    case TransportError::Kind::connect:
    case TransportError::Kind::other:
      break;
  }
  return Error(ErrorCode::llm_transport, e.what(), details);
}

}  // namespace

bool TransportError::transient() const noexcept {
  switch (kind_) {
    case Kind::timeout:
    case Kind::connect:
      return true;
    case Kind::http_status:
      return http_status_ >= 500 || http_status_ == 429;
    default:
      return false;
  }
}

void LlmConfig::validate() const {
  if (!(temperature >= 0.0 && temperature <= 2.0)) config_error("temperature must be within [0, 2]");
  if (!(timeout_seconds > 0.0)) config_error("timeout-seconds must be positive");
  if (max_tokens && *max_tokens <= 0) config_error("max-tokens must be positive when set");
  if (retry_count < 0 || retry_count > 10) config_error("retry-count must be within [0, 10]");
  if (parallelism < 1) config_error("parallelism must be at least 1");
}

LlmConfig LlmConfig::profile_named(std::string_view name) {
  LlmConfig c;
  c.profile = std::string(name);
  if (name == "gpt-4o") {
    c.endpoint_url = "https://api.openai.com/v1/chat/completions";
    c.model_name = "gpt-4o";
    c.temperature = 0.6;
  } else if (name == "deepseek") {
    c.endpoint_url = "https://api.deepseek.com/chat/completions";
    c.model_name = "deepseek-reasoner";
    c.temperature = 0.0;
  } else if (name != "default") {
    config_error("unknown llm profile '" + std::string(name) + "'");
  }
  return c;
}

LlmConfig LlmConfig::from_json(const Json& config, const char* api_key_env) {
  LlmConfig c = profile_named(config.value("profile", std::string("default")));
  try {
    if (config.contains("endpoint-url")) c.endpoint_url = config.at("endpoint-url").get<std::string>();
    if (config.contains("model-name")) c.model_name = config.at("model-name").get<std::string>();
    if (config.contains("temperature")) c.temperature = config.at("temperature").get<double>();
    if (config.contains("max-tokens")) {
      const auto& mt = config.at("max-tokens");
      if (mt.is_null()) {
        c.max_tokens.reset();
      } else {
        c.max_tokens = mt.get<int>();
      }
    }
    if (config.contains("timeout-seconds")) c.timeout_seconds = config.at("timeout-seconds").get<double>();
    if (config.contains("retry-count")) c.retry_count = config.at("retry-count").get<int>();
    if (config.contains("parallelism")) c.parallelism = config.at("parallelism").get<int>();
  } catch (const nlohmann::json::exception& e) {
    config_error(std::string("bad llm config: ") + e.what());
  }
  if (api_key_env != nullptr) {
    if (const char* key = std::getenv(api_key_env)) c.api_key = key;
  }
  c.validate();
  return c;
}

Json LlmConfig::to_json() const {
  Json j{{"profile", profile},
         {"endpoint-url", endpoint_url},
         {"model-name", model_name},
         {"temperature", temperature},
         {"max-tokens", max_tokens ? Json(*max_tokens) : Json(nullptr)},
         {"timeout-seconds", timeout_seconds},
         {"retry-count", retry_count},
         {"parallelism", parallelism}};
  return j;
}

Json chat_request_body(const DualRolePrompt& prompt, const LlmConfig& config) {
  Json body{{"model", config.model_name},
            {"messages",
             Json::array({Json{{"role", "system"}, {"content", prompt.system_message}},
                          Json{{"role", "user"}, {"content", prompt.user_message}}})},
            {"temperature", config.temperature}};
  if (config.max_tokens) body["max_tokens"] = *config.max_tokens;
  return body;
}

Completion parse_chat_response(std::string_view body, std::string_view fallback_model) {
  if (body.empty()) throw TransportError(TransportError::Kind::empty_body, "empty response body");
  Json doc;
  try {
    doc = Json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw TransportError(TransportError::Kind::other, std::string("response is not JSON: ") + e.what());
  }
  Completion c;
  c.model_name = doc.value("model", std::string(fallback_model));
  const Json* content = nullptr;
  if (auto choices = doc.find("choices"); choices != doc.end() && choices->is_array() && !choices->empty()) {
    const auto& first = choices->front();
    if (auto msg = first.find("message"); msg != first.end() && msg->is_object()) {
      if (auto ct = msg->find("content"); ct != msg->end() && ct->is_string()) content = &*ct;
    }
  }
  if (content == nullptr || content->get_ref<const std::string&>().empty()) {
    throw TransportError(TransportError::Kind::empty_body, "response carries no message content");
  }
  c.text = content->get<std::string>();
  if (auto usage = doc.find("usage"); usage != doc.end() && usage->is_object()) {
    if (usage->contains("prompt_tokens")) c.prompt_tokens = usage->at("prompt_tokens").get<int>();
    if (usage->contains("completion_tokens")) c.completion_tokens = usage->at("completion_tokens").get<int>();
  }
  return c;
}

Completion HttpChatTransport::send(const DualRolePrompt& prompt, const LlmConfig& config) {
  std::map<std::string, std::string> headers{{"Content-Type", "application/json"}};
  if (!config.api_key.empty()) headers["Authorization"] = "Bearer " + config.api_key;
  auto timeout = std::chrono::milliseconds(static_cast<std::int64_t>(config.timeout_seconds * 1000.0));
  auto res = net::request("POST", config.endpoint_url, chat_request_body(prompt, config).dump(), headers, timeout);
  switch (res.failure) {
    case net::Failure::none: break;
    case net::Failure::timeout: throw TransportError(TransportError::Kind::timeout, res.error);
    case net::Failure::connect: throw TransportError(TransportError::Kind::connect, res.error);
    case net::Failure::other: throw TransportError(TransportError::Kind::other, res.error);
  }
  if (res.status < 200 || res.status >= 300) {
    throw TransportError(TransportError::Kind::http_status,
                         "model endpoint returned HTTP " + std::to_string(res.status), res.status);
  }
  return parse_chat_response(res.body, config.model_name);
}

CompletionRecord make_record(const DualRolePrompt& prompt, const Completion& completion) {
  CompletionRecord rec;
  rec.template_name = prompt.template_name;
  rec.prompt_hash = prompt.hash();
  rec.system_message = prompt.system_message;
  rec.user_message = prompt.user_message;
  rec.text = completion.text;
  rec.model_name = completion.model_name;
  rec.latency_ms = completion.latency_ms;
  rec.attempts = completion.attempts;
  return rec;
}

LlmGateway::LlmGateway(LlmConfig config, std::shared_ptr<ChatTransport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
  config_.validate();
  if (!transport_) throw Error(ErrorCode::invalid_config, "gateway needs a transport");
}

void LlmGateway::set_sink(CompletionSink sink) {
  std::lock_guard lock(mutex_);
  sink_ = std::move(sink);
}

Completion LlmGateway::complete(const DualRolePrompt& prompt) {
  CompletionSink sink;
  std::uint64_t seq = 0;
  {
    std::unique_lock lock(mutex_);
    slots_cv_.wait(lock, [&] { return in_flight_ < config_.parallelism; });
    ++in_flight_;
    seq = ++counter_;
    sink = sink_;
  }
  struct SlotRelease {
    LlmGateway* self;
    ~SlotRelease() {
      {
        std::lock_guard lock(self->mutex_);
        --self->in_flight_;
      }
      self->slots_cv_.notify_one();
    }
  } release{this};

  const int max_attempts = config_.retry_count + 1;
  const auto started = std::chrono::steady_clock::now();
  for (int attempt = 1;; ++attempt) {
    try {
      Completion c = transport_->send(prompt, config_);
      if (c.text.empty()) {
        throw Error(ErrorCode::llm_empty_response, "model returned an empty completion", Json{{"attempts", attempt}});
      }
      c.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();
      if (c.model_name.empty()) c.model_name = config_.model_name;
      c.attempts = attempt;
      if (sink) {
        auto rec = make_record(prompt, c);
        rec.id = "c" + std::to_string(seq);
        sink(rec);
      }
      return c;
    } catch (const TransportError& e) {
      if (!e.transient() || attempt >= max_attempts) throw to_error(e, attempt);
      std::this_thread::sleep_for(std::chrono::milliseconds(20 * attempt));
    }
  }
}

}  // namespace restcheck::llm
