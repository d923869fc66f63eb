#include "tir/conformance.hpp"

#include <chrono>
#include <memory>
#include <optional>

#include "tir/error.hpp"
#include "tir/executor.hpp"
#include "tir/subprocess.hpp"

namespace tir {

namespace {

using Clock = std::chrono::steady_clock;
using std::chrono::milliseconds;

constexpr int kTimeoutJobMs = 500;
constexpr std::int64_t kTimeoutToleranceMs = 100;
constexpr std::size_t kTruncationLimit = 65536;

struct Exchange {
  std::optional<ExecReply> reply;
  std::string failure;
  std::int64_t wall_ms = 0;
};

class Session {
 public:
  explicit Session(std::string command) : command_(std::move(command)) {}

  Exchange send(const ExecJob& job) {
    Exchange ex;
    try {
      if (!worker_) worker_ = std::make_unique<Subprocess>(command_);
    } catch (const Error& e) {
      ex.failure = std::string("cannot start worker: ") + e.what();
      return ex;
    }
    const auto start = Clock::now();
    if (!worker_->write_line(encode_job(job))) {
      ex.failure = "worker closed its input";
      worker_.reset();
      return ex;
    }
    const auto line = worker_->read_line(milliseconds(job.timeout_ms) + milliseconds(5000));
    ex.wall_ms = std::chrono::duration_cast<milliseconds>(Clock::now() - start).count();
    if (!line) {
      ex.failure = "no reply";
      worker_->kill();
      worker_.reset();
      return ex;
    }
    try {
      ex.reply = decode_reply(*line);
    } catch (const Error& e) {
      ex.failure = std::string("undecodable reply: ") + e.what();
      worker_->kill();
      worker_.reset();
    }
    return ex;
  }

  std::unique_ptr<Subprocess> take() {
    if (!worker_) worker_ = std::make_unique<Subprocess>(command_);
    return std::move(worker_);
  }

 private:
  std::string command_;
  std::unique_ptr<Subprocess> worker_;
};

ExecJob make_job(std::string id, std::string code, int timeout_ms = 10000,
                 std::size_t max_output_bytes = kTruncationLimit) {
  ExecJob job;
  job.id = std::move(id);
  job.code = std::move(code);
  job.timeout_ms = timeout_ms;
  job.max_output_bytes = max_output_bytes;
  return job;
}

std::string status_mismatch(const ExecReply& r, ExecStatus want) {
  return "status " + std::string(to_string(r.result.status)) + ", expected " + std::string(to_string(want)) +
         (r.result.std_err.empty() ? "" : " (stderr: " + r.result.std_err.substr(0, 200) + ")");
}

}  // namespace

std::vector<ConformanceCase> run_conformance(const std::string& runner_cmd) {
  std::vector<ConformanceCase> cases;
  Session session(runner_cmd);

  const auto record = [&](std::string name, const Exchange& ex, auto&& check) {
    ConformanceCase c;
    c.name = std::move(name);
    c.wall_ms = ex.wall_ms;
    if (!ex.reply) {
      c.detail = ex.failure;
    } else {
      c.detail = check(*ex.reply, ex.wall_ms);
      c.passed = c.detail.empty();
    }
    cases.push_back(std::move(c));
  };

  {
    const ExecJob job = make_job("conformance-echo-\xE0\xA7\xA7", "print(\"\\\\boxed{10}\")");
    const Exchange ex = session.send(job);
    record("echo", ex, [&](const ExecReply& r, std::int64_t) -> std::string {
      return r.id == job.id ? "" : "reply id '" + r.id + "' does not echo '" + job.id + "'";
    });
    record("ok", ex, [](const ExecReply& r, std::int64_t) -> std::string {
      if (r.result.status != ExecStatus::ok) return status_mismatch(r, ExecStatus::ok);
      if (r.result.std_out.find("\\boxed{10}") == std::string::npos) return "stdout lacks \\boxed{10}";
      return "";
    });
  }

  record("nonzero_exit", session.send(make_job("conformance-raise", "raise ValueError(\"conformance probe\")")),
         [](const ExecReply& r, std::int64_t) -> std::string {
           if (r.result.status != ExecStatus::nonzero_exit) return status_mismatch(r, ExecStatus::nonzero_exit);
           if (r.result.std_err.find("ValueError: conformance probe") == std::string::npos) {
             return "stderr lacks the exception line";
           }
           return "";
         });

  record("timeout", session.send(make_job("conformance-timeout", "while True:\n    pass\n", kTimeoutJobMs)),
         [](const ExecReply& r, std::int64_t wall) -> std::string {
           if (r.result.status != ExecStatus::timeout) return status_mismatch(r, ExecStatus::timeout);
           if (r.result.duration_ms < kTimeoutJobMs) {
             return "duration_ms " + std::to_string(r.result.duration_ms) + " is below the timeout";
           }
           if (wall < kTimeoutJobMs - kTimeoutToleranceMs || wall > kTimeoutJobMs + kTimeoutToleranceMs) {
             return "reply arrived after " + std::to_string(wall) + " ms, outside 500 +- 100 ms";
           }
           return "";
         });

  record("truncation", session.send(make_job("conformance-flood", "print(\"x\" * 10485760)")),
         [](const ExecReply& r, std::int64_t) -> std::string {
           if (r.result.status != ExecStatus::ok) return status_mismatch(r, ExecStatus::ok);
           const auto& out = r.result.std_out;
           if (out.size() > kTruncationLimit + kTruncationMarker.size()) {
             return "stdout has " + std::to_string(out.size()) + " bytes";
           }
           if (!out.ends_with(kTruncationMarker)) return "stdout lacks the truncation marker";
           return "";
         });

  {
    const Exchange define = session.send(make_job("conformance-define", "conformance_secret = 41\nprint(\"defined\")"));
    const Exchange read = session.send(make_job("conformance-read", "print(conformance_secret)"));
    Exchange both = read;
    if (!define.reply) both = define;
    record("isolation", both, [&](const ExecReply& r, std::int64_t) -> std::string {
      if (define.reply->result.status != ExecStatus::ok) return "define job: " + status_mismatch(*define.reply, ExecStatus::ok);
      if (r.result.status != ExecStatus::nonzero_exit) return "read job: " + status_mismatch(r, ExecStatus::nonzero_exit);
      if (r.result.std_err.find("NameError") == std::string::npos) return "read job stderr lacks NameError";
      return "";
    });
  }

  {
    ConformanceCase c;
    c.name = "eof_exit";
    try {
      auto worker = session.take();
      const auto start = Clock::now();
      worker->close_stdin();
      const auto code = worker->wait_exit(milliseconds(5000));
      c.wall_ms = std::chrono::duration_cast<milliseconds>(Clock::now() - start).count();
      if (!code) {
        c.detail = "worker still running 5 s after stdin EOF";
        worker->kill();
      } else if (*code != 0) {
        c.detail = "worker exited with status " + std::to_string(*code);
      } else {
        c.passed = true;
      }
    } catch (const Error& e) {
      c.detail = e.what();
    }
    cases.push_back(std::move(c));
  }
  return cases;
}

}  // namespace tir
