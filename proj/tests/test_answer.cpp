#include <doctest.h>

#include <random>

#include "tir/answer.hpp"

using tir::validate_answer;

TEST_CASE("validate_answer accepts plain non-negative integers") {
  CHECK(validate_answer("42") == 42);
  CHECK(validate_answer("0") == 0);
  CHECK(validate_answer("  17\n") == 17);
  CHECK(validate_answer("007") == 7);
  CHECK(validate_answer("9223372036854775807") == INT64_MAX);
}

TEST_CASE("validate_answer normalizes Bangla digits") {
  CHECK(validate_answer("৪২") == 42);
  CHECK(validate_answer("১০০") == 100);
  CHECK(validate_answer("১2৩") == 123);  // mixed scripts
  CHECK(tir::normalize_digits("x=০১২৩৪৫৬৭৮৯") == "x=0123456789");
}

TEST_CASE("validate_answer rejects everything else") {
  CHECK_FALSE(validate_answer("-5"));
  CHECK_FALSE(validate_answer("+5"));
  CHECK_FALSE(validate_answer(""));
  CHECK_FALSE(validate_answer("   "));
  CHECK_FALSE(validate_answer("1,000"));
  CHECK_FALSE(validate_answer("3.0"));
  CHECK_FALSE(validate_answer("1e3"));
  CHECK_FALSE(validate_answer("12 34"));
  CHECK_FALSE(validate_answer("x"));
  CHECK_FALSE(validate_answer("9223372036854775808"));
  CHECK_FALSE(validate_answer("99999999999999999999999"));
}

TEST_CASE("validate_answer round-trips its rendered output") {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<tir::Answer> d(0, 1'000'000'000);
  for (int i = 0; i < 20000; ++i) {
    const tir::Answer n = d(rng);
    REQUIRE(validate_answer(std::to_string(n)) == n);
  }
  CHECK(validate_answer(std::to_string(0)) == 0);
  CHECK(validate_answer(std::to_string(1'000'000'000)) == 1'000'000'000);
}
