#include <chrono>

#include "tir/error.hpp"
#include "tir/executor.hpp"
#include "tir/subprocess.hpp"

namespace tir {

namespace {

using Clock = std::chrono::steady_clock;

ExecutionResult runner_failure(std::string diagnostic, Clock::time_point start) {
  ExecutionResult r;
  r.status = ExecStatus::runner_failure;
  r.std_err = std::move(diagnostic);
  r.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
  return r;
}

}  // namespace

WorkerPoolExecutor::WorkerPoolExecutor(std::string command, std::chrono::milliseconds grace)
    : command_(std::move(command)), grace_(grace) {
  if (command_.empty()) throw ConfigError("runner command is empty");
}

WorkerPoolExecutor::~WorkerPoolExecutor() = default;

std::unique_ptr<Subprocess> WorkerPoolExecutor::acquire() {
  {
    std::lock_guard lock(mutex_);
    if (!idle_.empty()) {
      auto worker = std::move(idle_.back());
      idle_.pop_back();
      return worker;
    }
  }
  ++spawned_;
  return std::make_unique<Subprocess>(command_);
}

void WorkerPoolExecutor::release(std::unique_ptr<Subprocess> worker) {
  std::lock_guard lock(mutex_);
  idle_.push_back(std::move(worker));
}

ExecutionResult WorkerPoolExecutor::execute(std::string_view code, const ExecLimits& limits) {
  const auto start = Clock::now();
  ExecJob job;
  job.id = "job-" + std::to_string(next_job_++);
  job.code = std::string(code);
  job.timeout_ms = limits.timeout_ms;
  job.max_output_bytes = limits.max_output_bytes;
  job.validate();

  std::unique_ptr<Subprocess> worker;
  try {
    worker = acquire();
  } catch (const Error& e) {
    return runner_failure(std::string("cannot start runner: ") + e.what(), start);
  }

  if (!worker->write_line(encode_job(job))) {
    return runner_failure("runner '" + command_ + "' closed its input (failed to start?)", start);
  }
  const auto line = worker->read_line(std::chrono::milliseconds(limits.timeout_ms) + grace_);
  if (!line) {
    const auto code_or = worker->wait_exit(std::chrono::milliseconds(0));
    worker->kill();
    return runner_failure(code_or ? "runner exited with status " + std::to_string(*code_or) + " without replying"
                                  : "runner did not reply in time",
                          start);
  }

  ExecReply reply;
  try {
    reply = decode_reply(*line);
  } catch (const ParseError& e) {
    worker->kill();
    return runner_failure(std::string("runner sent an invalid reply: ") + e.what(), start);
  }
  if (reply.id != job.id) {
    worker->kill();
    return runner_failure("runner replied to job '" + reply.id + "' while '" + job.id + "' was pending", start);
  }
  release(std::move(worker));
  return reply.result;
}

}  // namespace tir
