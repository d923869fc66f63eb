#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tir {

struct ConformanceCase {
  std::string name;
  bool passed = false;
  std::string detail;
  std::int64_t wall_ms = 0;
};

/// Protocol test suite for an execution worker: echo, ok, nonzero_exit,
/// timeout (500 ms job, reply expected within +-100 ms), truncation (10 MiB
/// print), isolation (define then read) and clean exit on stdin EOF.
/// `runner_cmd` is run through /bin/sh.
std::vector<ConformanceCase> run_conformance(const std::string& runner_cmd);

}  // namespace tir
