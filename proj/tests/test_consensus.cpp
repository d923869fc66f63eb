#include <doctest.h>

#include <random>

#include "support/oracles.hpp"
#include "tir/consensus.hpp"

using Ballots = std::vector<std::optional<tir::Answer>>;

TEST_CASE("plurality wins") {
  const Ballots b = {4, 9, 9, std::nullopt, 4, 9};
  const auto r = tir::vote_answers("p", b);
  CHECK(r.elected == 9);
  CHECK(r.tally == std::map<tir::Answer, int>{{4, 2}, {9, 3}});
  CHECK(r.valid_votes == 5);
  CHECK(r.total_agents == 6);
  CHECK(r.problem_id == "p");
}

TEST_CASE("ties go to the earliest first vote") {
  CHECK(tir::vote_answers("p", Ballots{4, 9}).elected == 4);
  CHECK(tir::vote_answers("p", Ballots{9, 4}).elected == 9);
  CHECK(tir::vote_answers("p", Ballots{std::nullopt, 7, 3, 3, 7}).elected == 7);
}

TEST_CASE("no valid votes elects nothing") {
  const auto r = tir::vote_answers("p", Ballots{std::nullopt, std::nullopt});
  CHECK_FALSE(r.elected);
  CHECK(r.valid_votes == 0);
  CHECK(r.total_agents == 2);
  CHECK_FALSE(tir::vote_answers("p", Ballots{}).elected);
}

TEST_CASE("only answered traces vote") {
  std::vector<tir::AgentTrace> traces(4);
  traces[0].status = tir::AgentStatus::depth_exhausted;
  traces[1].status = tir::AgentStatus::answered;
  traces[1].final_answer = 5;
  traces[2].status = tir::AgentStatus::backend_error;
  traces[3].status = tir::AgentStatus::answered;
  traces[3].final_answer = 6;
  const auto r = tir::vote("q", traces);
  CHECK(r.elected == 5);
  CHECK(r.valid_votes == 2);
  CHECK(r.total_agents == 4);
}

TEST_CASE("vote agrees with the brute-force oracle") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 50);
    const int spread = 1 + static_cast<int>(rng() % 6);
    Ballots b;
    for (int i = 0; i < n; ++i) {
      if (rng() % 7 == 0) {
        b.push_back(std::nullopt);
      } else {
        b.push_back(static_cast<tir::Answer>(rng() % spread));
      }
    }
    const auto got = tir::vote_answers("r", b);
    const auto want = oracle::brute_vote(b);
    REQUIRE(got.elected == want.elected);
    REQUIRE(got.tally == want.tally);
  }
}

TEST_CASE("tally ignores order; the tie-break does not") {
  const Ballots b = {3, 1, 1, 3, 2};
  auto r1 = tir::vote_answers("p", b);
  Ballots reversed(b.rbegin(), b.rend());
  auto r2 = tir::vote_answers("p", reversed);
  CHECK(r1.tally == r2.tally);
  CHECK(r1.elected == 3);
  CHECK(r2.elected == 3);  // 2, 3, 1, 1, 3: 3 and 1 tie, 3 votes first

  const Ballots c = {1, 3, 3, 1};
  CHECK(tir::vote_answers("p", c).elected == 1);
  CHECK(tir::vote_answers("p", Ballots(c.rbegin(), c.rend())).elected == 1);
  const Ballots d = {5, 6, 6, 5, 6};
  CHECK(tir::vote_answers("p", d).elected == 6);
}
