#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "tir/answer.hpp"
#include "tir/chat.hpp"

namespace tir {

enum class Category { NumberTheory, Geometry, Combinatorics, FunctionalEquation, Algebra, Other };

std::string_view to_string(Category category);
std::optional<Category> parse_category(std::string_view name);

enum class Language { bn, en };

std::string_view to_string(Language language);
std::optional<Language> parse_language(std::string_view name);

struct Problem {
  std::string id;
  std::string statement_bn;
  std::optional<std::string> statement_en;
  std::optional<Answer> answer;
  std::optional<Category> category;
  std::vector<std::string> keywords;
  /// Worked tool-integrated solution, used when the problem serves as a few-shot exemplar.
  std::optional<std::string> solution_tir;
  /// Fields this version does not know about, in file order. Written back on save.
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();

  Category category_or_other() const { return category.value_or(Category::Other); }

  /// Statement in `language`, or an empty view when absent.
  std::string_view statement(Language language) const;
  /// First non-empty statement, Bangla preferred.
  std::string_view any_statement() const;
};

/// Ordered, id-unique set of problems. Immutable once constructed.
class Corpus {
 public:
  Corpus() = default;
  /// Throws ConfigError on duplicate ids.
  Corpus(std::string name, std::vector<Problem> problems);

  const std::string& name() const noexcept { return name_; }
  const std::vector<Problem>& problems() const noexcept { return problems_; }
  std::size_t size() const noexcept { return problems_.size(); }
  bool empty() const noexcept { return problems_.empty(); }
  const Problem* find(std::string_view id) const;

  auto begin() const noexcept { return problems_.begin(); }
  auto end() const noexcept { return problems_.end(); }

 private:
  std::string name_;
  std::vector<Problem> problems_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

/// Parses one record. Throws ParseError (carrying `line`) on schema violations.
Problem parse_problem(std::string_view record, std::size_t line);
std::string to_record(const Problem& problem);

/// Line-delimited records; blank lines are skipped. Errors name the offending line.
Corpus parse_corpus(std::istream& in, std::string name);
Corpus load_corpus(const std::filesystem::path& path);
void save_corpus(const Corpus& corpus, std::ostream& out);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

/// Chat prompt asking an external model for `k` answer-preserving paraphrases,
/// returned as a numbered list.
Conversation build_augmentation_prompt(const Problem& problem, int k);

/// Extracts up to `k` items from lines numbered "N." or "N)". Other lines are ignored.
std::vector<std::string> parse_augmentation_reply(std::string_view reply, int k);

}  // namespace tir
