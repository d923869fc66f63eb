#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

#include <sys/types.h>

namespace tir {

/// A child process started with `/bin/sh -c <command>`, with its stdin and
/// stdout attached to pipes. stderr is inherited. The destructor closes stdin
/// and reaps the child, killing it if it does not exit promptly.
class Subprocess {
 public:
  explicit Subprocess(const std::string& command);
  ~Subprocess();

  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;

  /// Writes `line` plus '\n'. False if the child closed its end.
  bool write_line(std::string_view line);

  /// Next newline-terminated line (without the newline), or nullopt on EOF or
  /// when `timeout` elapses first.
  std::optional<std::string> read_line(std::chrono::milliseconds timeout);

  /// Closes the child's stdin (signals EOF to line-oriented workers).
  void close_stdin();

  /// Waits up to `timeout` for exit; returns the exit code if it exited.
  std::optional<int> wait_exit(std::chrono::milliseconds timeout);

  void kill();
  pid_t pid() const noexcept { return pid_; }

 private:
  pid_t pid_ = -1;
  int stdin_fd_ = -1;
  int stdout_fd_ = -1;
  std::string buffer_;
  bool eof_ = false;
  std::optional<int> exit_code_;
};

}  // namespace tir
