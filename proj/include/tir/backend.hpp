#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tir/chat.hpp"

namespace tir {

struct GenerationParams {
  double temperature = 0.0;
  int max_tokens = 2048;
  std::optional<std::int64_t> seed;
  std::string model_name;

  /// temperature in [0, 2], max_tokens >= 1.
  void validate() const;
};

/// Chat-completion client. Implementations must tolerate concurrent calls.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;

  /// Checks preconditions (non-empty, last message from user or tool, valid
  /// params) and returns the completion text. Throws BackendError subclasses
  /// for transport and protocol failures.
  std::string chat(std::span<const ChatMessage> messages, const GenerationParams& params);

  /// Fail-fast reachability check run before a harness launches agents.
  virtual void probe() {}

 protected:
  virtual std::string complete(std::span<const ChatMessage> messages, const GenerationParams& params) = 0;
};

// ---------------------------------------------------------------------------
// Scripted mock

struct MockRule {
  enum class Kind { substring, position };
  Kind kind = Kind::substring;
  std::string pattern;        // substring rules
  std::size_t position = 0;   // position rules: 1-based request sequence number
  bool error = false;         // ERROR rules answer with a ProtocolError
  std::string reply;
  std::size_t line = 0;       // header line in the script file

  bool matches(std::string_view last_text, std::size_t sequence) const;
  std::string describe() const;
};

struct MockScript {
  std::vector<MockRule> rules;
};

/// Script format, one rule per block:
///
///     ON <substring | #position> REPLY <<<
///     ...reply lines...
///     >>>
///
/// `ERROR` in place of `REPLY` makes matching requests fail with a protocol
/// error carrying the block text. Blank lines and `#` comments between blocks
/// are ignored.
MockScript parse_mock(std::string_view text);
MockScript load_mock(const std::filesystem::path& path);

/// Deterministic backend answering from a MockScript. A request is matched on
/// its last message (the newest user or tool turn); exactly one rule must match.
class MockBackend final : public ChatBackend {
 public:
  struct Exchange {
    std::size_t sequence = 0;
    std::string request;
    std::string reply;
  };

  explicit MockBackend(MockScript script);

  std::size_t request_count() const;
  std::vector<Exchange> transcript() const;

 protected:
  std::string complete(std::span<const ChatMessage> messages, const GenerationParams& params) override;

 private:
  MockScript script_;
  mutable std::mutex mutex_;
  std::size_t sequence_ = 0;
  std::vector<Exchange> transcript_;
};

// ---------------------------------------------------------------------------
// HTTP chat-completions client

struct HttpBackendConfig {
  /// Base URL such as http://localhost:8000/v1; "/chat/completions" is appended
  /// unless already present.
  std::string url;
  std::string api_key;
  int retries = 3;
  std::chrono::milliseconds request_timeout{120000};
  std::chrono::milliseconds initial_backoff{500};
  std::size_t max_in_flight = 16;

  /// Reads TIR_BACKEND_URL and TIR_BACKEND_KEY.
  static HttpBackendConfig from_env();
};

class HttpBackend final : public ChatBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);
  ~HttpBackend() override;

  void probe() override;

  /// Upper bound on the wall-clock time of one chat() call.
  std::chrono::milliseconds time_budget() const;

 protected:
  std::string complete(std::span<const ChatMessage> messages, const GenerationParams& params) override;

 private:
  HttpBackendConfig config_;
  std::string origin_;    // scheme://host[:port]
  std::string endpoint_;  // path of the completions resource
  std::string base_path_;
  std::unique_ptr<std::counting_semaphore<1024>> in_flight_;
};

}  // namespace tir
