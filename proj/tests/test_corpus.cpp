#include <doctest.h>

#include <sstream>

#include "support/oracles.hpp"
#include "tir/corpus.hpp"
#include "tir/error.hpp"

namespace {

tir::Corpus parse(const std::string& text) {
  std::istringstream in(text);
  return tir::parse_corpus(in, "t");
}

}  // namespace

TEST_CASE("corpus records parse with all fields") {
  const auto c = parse(
      R"({"id":"a","statement_bn":"বাংলা","statement_en":"English","answer":12,"category":"Geometry","keywords":["x","y"]})"
      "\n\n"
      R"({"id":"b","statement_bn":"শুধু বাংলা"})"
      "\n");
  REQUIRE(c.size() == 2);
  const auto* a = c.find("a");
  REQUIRE(a != nullptr);
  CHECK(a->answer == 12);
  CHECK(a->category == tir::Category::Geometry);
  CHECK(a->keywords == std::vector<std::string>{"x", "y"});
  CHECK(a->statement(tir::Language::en) == "English");
  const auto* b = c.find("b");
  CHECK_FALSE(b->answer);
  CHECK(b->statement(tir::Language::en).empty());
  CHECK(b->category_or_other() == tir::Category::Other);
}

TEST_CASE("corpus errors name the line") {
  const auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse(text);
    } catch (const tir::ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("{\"id\":\"a\",\"statement_bn\":\"x\"}\n{\"id\":\"b\"}\n") == 2);
  CHECK(line_of("{\"id\":\"a\",\"statement_bn\":\"x\",\"answer\":-3}\n") == 1);
  CHECK(line_of("{\"id\":\"a\",\"statement_bn\":\"x\",\"answer\":2.5}\n") == 1);
  CHECK(line_of("{\"id\":\"a\",\"statement_bn\":\"x\",\"category\":\"Topology\"}\n") == 1);
  CHECK(line_of("\n\nnot json\n") == 3);
  CHECK(line_of("{\"id\":\"a\",\"statement_bn\":\"\"}\n") == 1);
  CHECK(line_of("{\"id\":\"a\",\"statement_bn\":\"x\"}\n{\"id\":\"a\",\"statement_bn\":\"y\"}\n") == 2);
}

TEST_CASE("duplicate ids report both lines") {
  try {
    parse("{\"id\":\"a\",\"statement_bn\":\"x\"}\n\n{\"id\":\"a\",\"statement_bn\":\"y\"}\n");
    FAIL("expected an error");
  } catch (const tir::ParseError& e) {
    const std::string what = e.what();
    CHECK(what.find("line 1") != std::string::npos);
    CHECK(what.find("line 3") != std::string::npos);
  }
}

TEST_CASE("canonical corpus files round-trip byte for byte") {
  for (const char* name : {"golden/corpus.jsonl", "golden/exemplars.jsonl", "corpus/canonical.jsonl"}) {
    const std::string text = oracle::slurp(oracle::fixtures() / name);
    std::istringstream in(text);
    const auto c = tir::parse_corpus(in, name);
    std::ostringstream out;
    tir::save_corpus(c, out);
    CHECK_MESSAGE(out.str() == text, name);
  }
}

TEST_CASE("unknown fields survive a round trip in order") {
  const std::string line = R"({"id":"a","statement_bn":"x","answer":1,"source":"bdmo","year":2023,"meta":{"k":[1,2]}})";
  const auto p = tir::parse_problem(line, 1);
  CHECK(p.extra.size() == 3);
  CHECK(tir::to_record(p) == line);
}

TEST_CASE("augmentation prompt requests k numbered variants of the statement") {
  tir::Problem p;
  p.id = "a";
  p.statement_bn = "একটি বর্গের ক্ষেত্রফল 49";
  const auto five = tir::build_augmentation_prompt(p, 5);
  REQUIRE(five.size() == 2);
  CHECK(five.back().role == tir::Role::user);
  CHECK(five.back().content.find(p.statement_bn) != std::string::npos);
  CHECK(five.back().content.find("5 paraphrased and similar versions") != std::string::npos);
  const auto one = tir::build_augmentation_prompt(p, 1);
  CHECK(one.back().content.find("1 paraphrased and similar version ") != std::string::npos);
  CHECK_THROWS_AS(tir::build_augmentation_prompt(p, 0), tir::ConfigError);

  tir::Problem empty;
  empty.id = "e";
  CHECK_THROWS_AS(tir::build_augmentation_prompt(empty, 5), tir::ConfigError);
}

TEST_CASE("augmentation replies parse numbered items only") {
  using tir::parse_augmentation_reply;
  CHECK(parse_augmentation_reply("1. A\n2. B\n3. C", 3) == std::vector<std::string>{"A", "B", "C"});
  CHECK(parse_augmentation_reply("1) A\n2) B", 5) == std::vector<std::string>{"A", "B"});
  CHECK(parse_augmentation_reply("Sure! Here you go:\n1. A\n- B\n2.C\n 3.  C  \n", 5) ==
        std::vector<std::string>{"A", "C"});
  CHECK(parse_augmentation_reply("", 5).empty());

  // Oracle for the 7-item reply: count the numbered lines by eye, keep the first 5.
  const std::string seven = oracle::slurp(oracle::fixtures() / "corpus/augment_reply_7.txt");
  const auto items = parse_augmentation_reply(seven, 5);
  CHECK(items.size() == 5);
  CHECK(items.front() == "একটি আয়তক্ষেত্রের দৈর্ঘ্য প্রস্থের দ্বিগুণ।");
  CHECK(items.back() == "Variant five.");
}

TEST_CASE("augmentation parsing never exceeds k") {
  std::mt19937_64 rng(7);
  const std::vector<std::string> pieces = {"1. a", "2) b", "x", "", "10. c", "3.d", " 4)  e ", "5. "};
  for (int trial = 0; trial < 2000; ++trial) {
    std::string reply;
    const int lines = static_cast<int>(rng() % 12);
    for (int i = 0; i < lines; ++i) reply += pieces[rng() % pieces.size()] + "\n";
    const int k = 1 + static_cast<int>(rng() % 6);
    REQUIRE(tir::parse_augmentation_reply(reply, k).size() <= static_cast<std::size_t>(k));
  }
}
