#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>

#include "tir/agent.hpp"
#include "tir/answer.hpp"

namespace tir {

struct ConsensusResult {
  std::string problem_id;
  std::map<Answer, int> tally;
  std::optional<Answer> elected;
  int valid_votes = 0;
  int total_agents = 0;

  bool operator==(const ConsensusResult&) const = default;
};

/// Plurality vote over the answered traces. Exact ties go to the answer whose
/// first vote appears earliest in trace order. Agents without an answer abstain.
ConsensusResult vote(std::string problem_id, std::span<const AgentTrace> traces);

/// Same rule over raw ballots; nullopt entries abstain.
ConsensusResult vote_answers(std::string problem_id, std::span<const std::optional<Answer>> ballots);

}  // namespace tir
