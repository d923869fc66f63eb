#include "tir/corpus.hpp"

#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <regex>
#include <sstream>

#include "tir/error.hpp"

namespace tir {

using ojson = nlohmann::ordered_json;

namespace {

constexpr std::string_view kCategoryNames[] = {"NumberTheory", "Geometry", "Combinatorics",
                                               "FunctionalEquation", "Algebra", "Other"};

const std::string& require_string(const ojson& record, const char* key, std::size_t line) {
  const auto& value = record.at(key);
  if (!value.is_string()) throw ParseError(std::string("field '") + key + "' must be a string", line);
  return value.get_ref<const std::string&>();
}

}  // namespace

std::string_view to_string(Category category) {
  return kCategoryNames[static_cast<std::size_t>(category)];
}

std::optional<Category> parse_category(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kCategoryNames); ++i) {
    if (kCategoryNames[i] == name) return static_cast<Category>(i);
  }
  return std::nullopt;
}

std::string_view to_string(Language language) { return language == Language::bn ? "bn" : "en"; }

std::optional<Language> parse_language(std::string_view name) {
  if (name == "bn") return Language::bn;
  if (name == "en") return Language::en;
  return std::nullopt;
}

std::string_view Problem::statement(Language language) const {
  if (language == Language::bn) return statement_bn;
  return statement_en ? std::string_view(*statement_en) : std::string_view();
}

std::string_view Problem::any_statement() const {
  if (!statement_bn.empty()) return statement_bn;
  return statement(Language::en);
}

Corpus::Corpus(std::string name, std::vector<Problem> problems)
    : name_(std::move(name)), problems_(std::move(problems)) {
  by_id_.reserve(problems_.size());
  for (std::size_t i = 0; i < problems_.size(); ++i) {
    const auto [it, inserted] = by_id_.emplace(problems_[i].id, i);
    if (!inserted) {
      throw ConfigError("duplicate id '" + problems_[i].id + "' at positions " +
                        std::to_string(it->second + 1) + " and " + std::to_string(i + 1));
    }
  }
}

const Problem* Corpus::find(std::string_view id) const {
  const auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &problems_[it->second];
}

Problem parse_problem(std::string_view text, std::size_t line) {
  ojson record;
  try {
    record = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw ParseError(std::string("malformed record: ") + e.what(), line);
  }
  if (!record.is_object()) throw ParseError("record is not an object", line);
  if (!record.contains("id")) throw ParseError("missing field 'id'", line);
  if (!record.contains("statement_bn")) throw ParseError("missing field 'statement_bn'", line);

  Problem p;
  for (auto it = record.begin(); it != record.end(); ++it) {
    const std::string& key = it.key();
    const ojson& value = it.value();
    if (key == "id") {
      p.id = require_string(record, "id", line);
      if (p.id.empty()) throw ParseError("field 'id' is empty", line);
    } else if (key == "statement_bn") {
      p.statement_bn = require_string(record, "statement_bn", line);
    } else if (key == "statement_en") {
      p.statement_en = require_string(record, "statement_en", line);
    } else if (key == "answer") {
      if (!value.is_number_integer()) throw ParseError("field 'answer' must be an integer", line);
      if (value.is_number_unsigned()) {
        const auto raw = value.get<std::uint64_t>();
        if (raw > static_cast<std::uint64_t>(std::numeric_limits<Answer>::max())) {
          throw ParseError("field 'answer' is out of range", line);
        }
        p.answer = static_cast<Answer>(raw);
      } else {
        const auto raw = value.get<std::int64_t>();
        if (raw < 0) throw ParseError("field 'answer' must be non-negative, got " + std::to_string(raw), line);
        p.answer = raw;
      }
    } else if (key == "category") {
      const auto category = parse_category(require_string(record, "category", line));
      if (!category) throw ParseError("unknown category '" + value.get<std::string>() + "'", line);
      p.category = category;
    } else if (key == "keywords") {
      if (!value.is_array()) throw ParseError("field 'keywords' must be an array of strings", line);
      for (const auto& kw : value) {
        if (!kw.is_string()) throw ParseError("field 'keywords' must be an array of strings", line);
        p.keywords.push_back(kw.get<std::string>());
      }
    } else if (key == "solution_tir") {
      p.solution_tir = require_string(record, "solution_tir", line);
    } else {
      p.extra[key] = value;
    }
  }
  if (p.statement_bn.empty() && p.statement(Language::en).empty()) {
    throw ParseError("problem '" + p.id + "' has no statement", line);
  }
  return p;
}

std::string to_record(const Problem& p) {
  ojson record;
  record["id"] = p.id;
  record["statement_bn"] = p.statement_bn;
  if (p.statement_en) record["statement_en"] = *p.statement_en;
  if (p.answer) record["answer"] = *p.answer;
  if (p.category) record["category"] = std::string(to_string(*p.category));
  if (!p.keywords.empty()) record["keywords"] = p.keywords;
  if (p.solution_tir) record["solution_tir"] = *p.solution_tir;
  for (auto it = p.extra.begin(); it != p.extra.end(); ++it) record[it.key()] = it.value();
  return record.dump();
}

Corpus parse_corpus(std::istream& in, std::string name) {
  std::vector<Problem> problems;
  std::unordered_map<std::string, std::size_t> first_line;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    Problem p = parse_problem(text, line);
    const auto [it, inserted] = first_line.emplace(p.id, line);
    if (!inserted) {
      throw ParseError("duplicate id '" + p.id + "' (first seen on line " + std::to_string(it->second) +
                           ", again on line " + std::to_string(line) + ")",
                       line);
    }
    problems.push_back(std::move(p));
  }
  return Corpus(std::move(name), std::move(problems));
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open corpus file " + path.string());
  return parse_corpus(in, path.stem().string());
}

void save_corpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& p : corpus) out << to_record(p) << '\n';
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write corpus file " + path.string());
  save_corpus(corpus, out);
}

Conversation build_augmentation_prompt(const Problem& problem, int k) {
  if (k < 1) throw ConfigError("augmentation count must be at least 1");
  const std::string_view statement = problem.any_statement();
  if (statement.empty()) throw ConfigError("problem '" + problem.id + "' has an empty statement");

  const std::string n = std::to_string(k);
  std::string request;
  request += "Please write " + n + (k == 1 ? " paraphrased and similar version" : " paraphrased and similar versions");
  request += " of the following math problem. Every version must keep the mathematical content and the final "
             "answer of the original unchanged, and must be written in the same language as the original.\n\n";
  request += "Reply with exactly " + n + (k == 1 ? " item" : " items") +
             " as a numbered list (1., 2., ...), one version per line, and nothing else.\n\n";
  request += "Problem:\n";
  request += statement;

  return {
      {Role::system, "You rewrite math olympiad problems without changing their answers."},
      {Role::user, std::move(request)},
  };
}

std::vector<std::string> parse_augmentation_reply(std::string_view reply, int k) {
  static const std::regex kItem(R"(^\s*\d+[.)]\s+(.*\S)\s*$)");
  std::vector<std::string> items;
  if (k < 1) return items;
  std::istringstream in{std::string(reply)};
  std::string line;
  std::smatch m;
  while (items.size() < static_cast<std::size_t>(k) && std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (std::regex_match(line, m, kItem)) items.push_back(m[1].str());
  }
  return items;
}

}  // namespace tir
