#include <doctest.h>

#include "support/oracles.hpp"
#include "tir/error.hpp"
#include "tir/prompting.hpp"

namespace {

// Reference prompt texts, copied character for character (including the
// trailing spaces at some line ends).
constexpr std::string_view kBase =
    "Here is a math problem in Bengali:\n"
    "{problem}\n"
    "\n"
    "The answer is a non-negative integer. Please reason step by step to solve the problem above. Provide Python "
    "code to verify your reasoning.\n"
    "\n"
    "Put your final integer answer within \\boxed{}.";
constexpr std::string_view kNumberTheory = "Please write brute force solution codes to answer.";
constexpr std::string_view kTranslation = "Please translate the problem to English first. Then solve the problem.";
constexpr std::string_view kAdvanced =
    "Solve the problem in Bengali by explaining all intermediate steps in English. \n"
    "Use Python to verify the solution. \n"
    "Highlight important mathematical reasoning.";
constexpr std::string_view kStepByStep =
    "Explain the problem-solving process using detailed reasoning.\n"
    "Start from basics and gradually solve the problem step by step. Show intermediate results \n"
    "clearly. \n"
    "Verify with Python.";

tir::Problem problem(tir::Category c) {
  tir::Problem p;
  p.id = "p";
  p.statement_bn = "সমস্যা";
  p.statement_en = "problem";
  p.category = c;
  return p;
}

}  // namespace

TEST_CASE("shipped templates carry the reference texts verbatim") {
  const auto& t = tir::TemplateSet::defaults();
  CHECK(t.at("base") == kBase);
  CHECK(t.at("tailored_number_theory") == kNumberTheory);
  CHECK(t.at("translation") == kTranslation);
  CHECK(t.at("advanced") == kAdvanced);
  CHECK(t.at("step_by_step") == kStepByStep);
}

TEST_CASE("template file round-trips byte for byte") {
  const std::string text = oracle::slurp(std::filesystem::path(TIR_DATA_DIR) / "templates.txt");
  REQUIRE_FALSE(text.empty());
  CHECK(tir::TemplateSet::parse(text).serialize() == text);
  CHECK(tir::TemplateSet::defaults().serialize() == text);
  CHECK(tir::TemplateSet::load(std::filesystem::path(TIR_DATA_DIR) / "templates.txt").serialize() == text);

  const std::string odd = "preamble\n--- a ---\nbody  \n\n\n--- b ---\r\nx";
  CHECK(tir::TemplateSet::parse(odd).serialize() == odd);
  CHECK(tir::TemplateSet::parse(odd).at("a") == "body  ");
}

TEST_CASE("template lookups") {
  const auto t = tir::TemplateSet::parse("--- a ---\nA\n--- b ---\nB\n");
  CHECK(t.ids() == std::vector<std::string>{"a", "b"});
  CHECK_FALSE(t.find("c"));
  CHECK_THROWS_AS(t.at("c"), tir::ConfigError);
}

TEST_CASE("substitute is a single left-to-right pass") {
  const std::pair<std::string_view, std::string_view> v[] = {{"problem", "use {instruction} here"},
                                                             {"instruction", "X"}};
  CHECK(tir::substitute("[{problem}] {instruction} {unknown} {", v) == "[use {instruction} here] X {unknown} {");
}

TEST_CASE("politeness toggle") {
  CHECK(tir::apply_politeness(kNumberTheory, true) == kNumberTheory);
  CHECK(tir::apply_politeness(kNumberTheory, false) == "Write brute force solution codes to answer.");
  CHECK(tir::apply_politeness("Write code.", true) == "Please write code.");
  CHECK(tir::apply_politeness("DP helps.", true) == "Please DP helps.");
}

TEST_CASE("tailored instructions by category") {
  CHECK(tir::tailored_instruction(tir::Category::NumberTheory) == std::string(kNumberTheory));
  CHECK(tir::tailored_instruction(tir::Category::Geometry)->find("coordinate geometry") != std::string::npos);
  CHECK(tir::tailored_instruction(tir::Category::Combinatorics)->find("dynamic programming") != std::string::npos);
  CHECK(tir::tailored_instruction(tir::Category::FunctionalEquation) ==
        tir::tailored_instruction(tir::Category::Combinatorics));
  CHECK_FALSE(tir::tailored_instruction(tir::Category::Algebra));
  CHECK_FALSE(tir::tailored_instruction(tir::Category::Other));
}

TEST_CASE("base prompt for a Bangla problem") {
  const auto msgs = tir::render_prompt(problem(tir::Category::Algebra), {}, {});
  REQUIRE(msgs.size() == 1);
  CHECK(msgs[0].role == tir::Role::user);
  std::string want(kBase);
  want.replace(want.find("{problem}"), 9, "সমস্যা");
  CHECK(msgs[0].content == want);
}

TEST_CASE("tailored instruction becomes the system message") {
  tir::PromptConfig cfg;
  cfg.instruction_mode = tir::InstructionMode::tailored;
  cfg.polite = true;
  const auto msgs = tir::render_prompt(problem(tir::Category::NumberTheory), {}, cfg);
  REQUIRE(msgs.size() == 2);
  CHECK(msgs[0].role == tir::Role::system);
  CHECK(msgs[0].content == kNumberTheory);
  CHECK(tir::render_prompt(problem(tir::Category::Other), {}, cfg).size() == 1);
}

TEST_CASE("exemplars precede the problem as user/assistant pairs") {
  tir::Exemplar ex{problem(tir::Category::Algebra), "```python\nprint(1)\n```\n\\boxed{1}"};
  ex.problem.statement_bn = "উদাহরণ";
  ex.problem.statement_en = "example";
  tir::PromptConfig cfg;
  cfg.problem_language = tir::Language::en;
  const tir::Exemplar exs[] = {ex, ex};
  const auto msgs = tir::render_prompt(problem(tir::Category::Algebra), exs, cfg);
  REQUIRE(msgs.size() == 5);
  CHECK(msgs[0].content == "example");
  CHECK(msgs[1].role == tir::Role::assistant);
  CHECK(msgs[4].content.starts_with("Here is a math problem:\nproblem\n"));
}

TEST_CASE("translate-first and reasoning-language variants") {
  tir::PromptConfig cfg;
  cfg.translate_first = true;
  auto msgs = tir::render_prompt(problem(tir::Category::Algebra), {}, cfg);
  CHECK(msgs.back().content.starts_with(std::string(kTranslation) + "\n\nHere is a math problem in Bengali:\nসমস্যা"));

  cfg = {};
  cfg.reasoning_language = tir::Language::en;
  msgs = tir::render_prompt(problem(tir::Category::Algebra), {}, cfg);
  CHECK(msgs.back().content.find(kAdvanced) != std::string::npos);
  CHECK(msgs.back().content.find("সমস্যা") != std::string::npos);

  cfg = {};
  cfg.template_id = tir::TemplateId::step_by_step;
  msgs = tir::render_prompt(problem(tir::Category::Algebra), {}, cfg);
  CHECK(msgs.back().content.find(kStepByStep) != std::string::npos);
}

TEST_CASE("prompt config validation") {
  tir::PromptConfig cfg;
  cfg.problem_language = tir::Language::en;
  cfg.translate_first = true;
  CHECK_THROWS_AS(cfg.validate(), tir::ConfigError);
  cfg = {};
  cfg.few_shot_count = 6;
  CHECK_THROWS_AS(cfg.validate(), tir::ConfigError);
  cfg.few_shot_count = -1;
  CHECK_THROWS_AS(cfg.validate(), tir::ConfigError);
  cfg.few_shot_count = 5;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("missing statement in the requested language is an error") {
  auto p = problem(tir::Category::Algebra);
  p.statement_en.reset();
  tir::PromptConfig cfg;
  cfg.problem_language = tir::Language::en;
  CHECK_THROWS_AS(tir::render_prompt(p, {}, cfg), tir::ConfigError);
}

TEST_CASE("a custom template without a box instruction gets one appended") {
  auto t = tir::TemplateSet::parse(tir::TemplateSet::defaults().serialize());
  std::string text = t.serialize();
  const auto at = text.find("--- base ---\n") + 13;
  text.replace(at, text.find("\n\n--- base_en") - at, "Solve: {problem}");
  const auto custom = tir::TemplateSet::parse(text);
  const auto msgs = tir::render_prompt(problem(tir::Category::Algebra), {}, {}, custom);
  CHECK(msgs.back().content == "Solve: সমস্যা\n\nPut your final integer answer within \\boxed{}.");
}
