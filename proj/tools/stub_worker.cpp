// Line-protocol execution worker backed by the stub interpreter. Useful for
// exercising the worker pool and the conformance suite without Python.
#include <iostream>
#include <string>

#include "tir/error.hpp"
#include "tir/executor.hpp"

int main() {
  std::ios::sync_with_stdio(false);
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    tir::ExecReply reply;
    try {
      const tir::ExecJob job = tir::decode_job(line);
      job.validate();
      reply = tir::run_job_with_stub(job, true);
    } catch (const tir::Error& e) {
      reply.result.status = tir::ExecStatus::runner_failure;
      reply.result.std_err = std::string("bad job: ") + e.what();
    }
    std::cout << tir::encode_reply(reply) << '\n' << std::flush;
  }
  return 0;
}
