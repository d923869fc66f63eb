#include "tir/consensus.hpp"

#include <vector>

namespace tir {

ConsensusResult vote_answers(std::string problem_id, std::span<const std::optional<Answer>> ballots) {
  ConsensusResult r;
  r.problem_id = std::move(problem_id);
  r.total_agents = static_cast<int>(ballots.size());

  std::vector<Answer> first_seen;
  for (const auto& b : ballots) {
    if (!b) continue;
    if (r.tally[*b]++ == 0) first_seen.push_back(*b);
    ++r.valid_votes;
  }
  // Scanning in first-occurrence order with a strict comparison keeps the
  // earliest answer among equals.
  int best = 0;
  for (Answer a : first_seen) {
    if (const int count = r.tally[a]; count > best) {
      best = count;
      r.elected = a;
    }
  }
  return r;
}

ConsensusResult vote(std::string problem_id, std::span<const AgentTrace> traces) {
  std::vector<std::optional<Answer>> ballots;
  ballots.reserve(traces.size());
  for (const auto& t : traces) {
    ballots.push_back(t.status == AgentStatus::answered ? t.final_answer : std::nullopt);
  }
  return vote_answers(std::move(problem_id), ballots);
}

}  // namespace tir
