#include <algorithm>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "tir/backend.hpp"
#include "tir/error.hpp"

namespace tir {

namespace {

using Clock = std::chrono::steady_clock;
using std::chrono::milliseconds;

std::string getenv_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : std::string();
}

void set_timeouts(httplib::Client& cli, milliseconds timeout) {
  const auto sec = static_cast<time_t>(timeout.count() / 1000);
  const auto usec = static_cast<time_t>((timeout.count() % 1000) * 1000);
  cli.set_connection_timeout(sec, usec);
  cli.set_read_timeout(sec, usec);
  cli.set_write_timeout(sec, usec);
}

std::string server_message(const std::string& body) {
  const auto parsed = nlohmann::json::parse(body, nullptr, false);
  if (!parsed.is_discarded() && parsed.is_object() && parsed.contains("error")) {
    const auto& err = parsed["error"];
    if (err.is_object() && err.contains("message") && err["message"].is_string()) return err["message"];
    if (err.is_string()) return err.get<std::string>();
  }
  return body;
}

// Servers commonly reject role "tool" without a tool_call_id; execution
// feedback travels as a user turn on the wire.
std::string_view wire_role(Role role) { return role == Role::tool ? "user" : to_string(role); }

}  // namespace

HttpBackendConfig HttpBackendConfig::from_env() {
  HttpBackendConfig c;
  c.url = getenv_or_empty("TIR_BACKEND_URL");
  c.api_key = getenv_or_empty("TIR_BACKEND_KEY");
  return c;
}

HttpBackend::HttpBackend(HttpBackendConfig config)
    : config_(std::move(config)),
      in_flight_(std::make_unique<std::counting_semaphore<1024>>(
          static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(config_.max_in_flight, 1, 1024)))) {
  if (config_.url.empty()) throw ConfigError("backend URL is empty (set TIR_BACKEND_URL or backend.url)");
  if (config_.retries < 0) throw ConfigError("backend retries must be >= 0");
  if (config_.request_timeout <= milliseconds::zero()) throw ConfigError("backend request timeout must be positive");

  const auto scheme_end = config_.url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("backend URL needs a scheme: " + config_.url);
  const auto path_start = config_.url.find('/', scheme_end + 3);
  origin_ = config_.url.substr(0, path_start);
  base_path_ = path_start == std::string::npos ? std::string() : config_.url.substr(path_start);
  while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
  constexpr std::string_view kResource = "/chat/completions";
  endpoint_ = base_path_.ends_with(kResource) ? base_path_ : base_path_ + std::string(kResource);
  if (base_path_.ends_with(kResource)) base_path_.resize(base_path_.size() - kResource.size());
}

HttpBackend::~HttpBackend() = default;

milliseconds HttpBackend::time_budget() const { return config_.request_timeout * (1 + config_.retries); }

void HttpBackend::probe() {
  httplib::Client cli(origin_);
  set_timeouts(cli, std::min(config_.request_timeout, milliseconds(10000)));
  if (!config_.api_key.empty()) cli.set_bearer_token_auth(config_.api_key);
  // Any HTTP answer proves the server is reachable; only transport failure counts.
  const auto res = cli.Get(base_path_ + "/models");
  if (!res) throw TransportError("backend " + config_.url + " unreachable: " + httplib::to_string(res.error()));
}

std::string HttpBackend::complete(std::span<const ChatMessage> messages, const GenerationParams& params) {
  nlohmann::json body;
  body["model"] = params.model_name;
  body["messages"] = nlohmann::json::array();
  for (const auto& m : messages) {
    body["messages"].push_back({{"role", wire_role(m.role)}, {"content", m.content}});
  }
  body["temperature"] = params.temperature;
  body["max_tokens"] = params.max_tokens;
  if (params.seed) body["seed"] = *params.seed;
  const std::string payload = body.dump();

  in_flight_->acquire();
  struct Release {
    std::counting_semaphore<1024>& s;
    ~Release() { s.release(); }
  } release{*in_flight_};

  const auto deadline = Clock::now() + time_budget();
  milliseconds backoff = config_.initial_backoff;
  std::string last_error;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    const auto remaining = std::chrono::duration_cast<milliseconds>(deadline - Clock::now());
    if (remaining <= milliseconds::zero()) break;

    httplib::Client cli(origin_);
    set_timeouts(cli, std::min(config_.request_timeout, remaining));
    if (!config_.api_key.empty()) cli.set_bearer_token_auth(config_.api_key);
    const auto res = cli.Post(endpoint_, payload, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      if (attempt == config_.retries) break;
      const auto left = std::chrono::duration_cast<milliseconds>(deadline - Clock::now());
      std::this_thread::sleep_for(std::clamp(backoff, milliseconds::zero(), std::max(left, milliseconds::zero())));
      backoff *= 2;
      continue;
    }
    if (res->status < 200 || res->status >= 300) throw ProtocolError(res->status, server_message(res->body));

    const auto parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) throw ProtocolError(res->status, "response body is not JSON");
    try {
      const auto& content = parsed.at("choices").at(0).at("message").at("content");
      if (content.is_null()) return {};
      return content.get<std::string>();
    } catch (const nlohmann::json::exception&) {
      throw ProtocolError(res->status, "response has no choices[0].message.content");
    }
  }
  throw TransportError("backend " + config_.url + " failed after " + std::to_string(config_.retries + 1) +
                       " attempt(s): " + (last_error.empty() ? "time budget exhausted" : last_error));
}

}  // namespace tir
