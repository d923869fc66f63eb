#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tir {

enum class ExecStatus { ok, nonzero_exit, timeout, runner_failure };

std::string_view to_string(ExecStatus status);
std::optional<ExecStatus> parse_exec_status(std::string_view name);

struct ExecutionResult {
  std::string std_out;
  std::string std_err;
  ExecStatus status = ExecStatus::runner_failure;
  std::int64_t duration_ms = 0;

  bool operator==(const ExecutionResult&) const = default;
};

inline constexpr int kMaxTimeoutMs = 120000;
inline constexpr std::size_t kMaxOutputBytes = std::size_t{1} << 20;
inline constexpr std::string_view kTruncationMarker = "\xE2\x80\xA6[truncated]";

struct ExecLimits {
  int timeout_ms = 10000;
  std::size_t max_output_bytes = 65536;
};

/// Cuts `text` to at most `max_bytes` (never inside a UTF-8 sequence) and
/// appends the truncation marker when anything was dropped.
std::string truncate_output(std::string text, std::size_t max_bytes);

/// Runs one generated program. Implementations must be safe for concurrent use.
class Executor {
 public:
  virtual ~Executor() = default;
  virtual ExecutionResult execute(std::string_view code, const ExecLimits& limits) = 0;
};

// ---------------------------------------------------------------------------
// Worker line protocol: one JSON object per line in each direction.

struct ExecJob {
  std::string id;
  std::string code;
  int timeout_ms = 10000;
  std::size_t max_output_bytes = 65536;
  /// Reserved for sandbox hardening; workers may ignore it.
  bool restricted = false;

  /// timeout_ms in (0, 120000], max_output_bytes in (0, 1 MiB].
  void validate() const;
};

struct ExecReply {
  std::string id;
  ExecutionResult result;
};

std::string encode_job(const ExecJob& job);
ExecJob decode_job(std::string_view line);
std::string encode_reply(const ExecReply& reply);
ExecReply decode_reply(std::string_view line);

// ---------------------------------------------------------------------------

/// In-process executor that interprets a small, deterministic subset of
/// Python: imports (ignored), `pass`, `name = expr`, `print(expr, ...)`,
/// `raise Name("msg")` and `while True: pass`. Expressions combine int and
/// str literals, names and parentheses with + - *. Anything else is reported
/// as runner_failure without running the program.
///
/// By default a timeout is reported without waiting; `real_time` makes the
/// infinite loop actually consume the time budget.
class StubExecutor final : public Executor {
 public:
  explicit StubExecutor(bool real_time = false) : real_time_(real_time) {}
  ExecutionResult execute(std::string_view code, const ExecLimits& limits) override;

 private:
  bool real_time_;
};

/// Answers one job with the stub interpreter. Used by the stub worker binary.
ExecReply run_job_with_stub(const ExecJob& job, bool real_time);

class Subprocess;

/// Executes jobs on external worker processes speaking the line protocol.
/// Each worker serves one job at a time; idle workers are reused and a worker
/// that misbehaves is killed and replaced.
class WorkerPoolExecutor final : public Executor {
 public:
  /// `command` is run through /bin/sh. Replies are awaited for the job
  /// timeout plus `grace` before the worker is declared hung.
  explicit WorkerPoolExecutor(std::string command, std::chrono::milliseconds grace = std::chrono::seconds(5));
  ~WorkerPoolExecutor() override;

  ExecutionResult execute(std::string_view code, const ExecLimits& limits) override;

  std::size_t spawned() const noexcept { return spawned_.load(); }

 private:
  std::unique_ptr<Subprocess> acquire();
  void release(std::unique_ptr<Subprocess> worker);

  std::string command_;
  std::chrono::milliseconds grace_;
  std::mutex mutex_;
  std::vector<std::unique_ptr<Subprocess>> idle_;
  std::atomic<std::uint64_t> next_job_{1};
  std::atomic<std::size_t> spawned_{0};
};

}  // namespace tir
