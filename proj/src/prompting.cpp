#include "tir/prompting.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <regex>
#include <sstream>

#include "tir/error.hpp"

namespace tir {

namespace embedded {
extern const std::string_view kTemplates;
}  // namespace embedded

namespace {

constexpr std::string_view kBoxedMarker = "\\boxed{";
constexpr std::string_view kBoxedFallback = "Put your final integer answer within \\boxed{}.";

std::string_view trim_trailing_newlines(std::string_view s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view to_string(InstructionMode mode) { return mode == InstructionMode::none ? "none" : "tailored"; }

std::optional<InstructionMode> parse_instruction_mode(std::string_view name) {
  if (name == "none") return InstructionMode::none;
  if (name == "tailored") return InstructionMode::tailored;
  return std::nullopt;
}

std::string_view to_string(TemplateId id) {
  switch (id) {
    case TemplateId::base: return "base";
    case TemplateId::advanced: return "advanced";
    case TemplateId::step_by_step: return "step_by_step";
  }
  return "base";
}

std::optional<TemplateId> parse_template_id(std::string_view name) {
  if (name == "base") return TemplateId::base;
  if (name == "advanced") return TemplateId::advanced;
  if (name == "step_by_step") return TemplateId::step_by_step;
  return std::nullopt;
}

void PromptConfig::validate() const {
  if (translate_first && problem_language != Language::bn) {
    throw ConfigError("translate_first requires problem_language = bn");
  }
  if (few_shot_count < 0 || few_shot_count > kMaxFewShot) {
    throw ConfigError("few_shot_count must be in [0, " + std::to_string(kMaxFewShot) + "], got " +
                      std::to_string(few_shot_count));
  }
}

TemplateSet TemplateSet::parse(std::string_view text) {
  static const std::regex kHeader(R"(^--- (\S+) ---\r?$)");
  TemplateSet set;
  std::string* body = &set.preamble_;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    const std::size_t next = end == std::string_view::npos ? text.size() : end + 1;
    const std::string_view line = text.substr(pos, next - pos);
    ++line_no;
    std::match_results<std::string_view::const_iterator> m;
    const std::string_view bare = trim_trailing_newlines(line);
    if (std::regex_match(bare.begin(), bare.end(), m, kHeader)) {
      std::string id = m[1].str();
      for (const auto& s : set.sections_) {
        if (s.id == id) throw ParseError("duplicate template '" + id + "'", line_no);
      }
      set.sections_.push_back({std::move(id), std::string(line), std::string()});
      body = &set.sections_.back().body;
    } else {
      body->append(line);
    }
    pos = next;
  }
  return set;
}

TemplateSet TemplateSet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open template file " + path.string());
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse(text);
}

const TemplateSet& TemplateSet::defaults() {
  static const TemplateSet kDefaults = parse(embedded::kTemplates);
  return kDefaults;
}

std::string TemplateSet::serialize() const {
  std::string out = preamble_;
  for (const auto& s : sections_) out += s.header + s.body;
  return out;
}

std::optional<std::string_view> TemplateSet::find(std::string_view id) const {
  for (const auto& s : sections_) {
    if (s.id == id) return trim_trailing_newlines(s.body);
  }
  return std::nullopt;
}

std::string_view TemplateSet::at(std::string_view id) const {
  const auto t = find(id);
  if (!t) throw ConfigError("template '" + std::string(id) + "' not found");
  return *t;
}

std::vector<std::string> TemplateSet::ids() const {
  std::vector<std::string> out;
  for (const auto& s : sections_) out.push_back(s.id);
  return out;
}

std::string substitute(std::string_view tmpl, std::span<const std::pair<std::string_view, std::string_view>> values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    bool replaced = false;
    if (tmpl[i] == '{') {
      for (const auto& [name, value] : values) {
        if (tmpl.substr(i + 1, name.size()) == name && i + 1 + name.size() < tmpl.size() &&
            tmpl[i + 1 + name.size()] == '}') {
          out += value;
          i += name.size() + 2;
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out.push_back(tmpl[i++]);
  }
  return out;
}

std::optional<std::string> tailored_instruction(Category category, const TemplateSet& templates) {
  switch (category) {
    case Category::NumberTheory: return std::string(templates.at("tailored_number_theory"));
    case Category::Geometry: return std::string(templates.at("tailored_geometry"));
    case Category::Combinatorics:
    case Category::FunctionalEquation: return std::string(templates.at("tailored_combinatorics"));
    case Category::Algebra:
    case Category::Other: return std::nullopt;
  }
  return std::nullopt;
}

std::string apply_politeness(std::string_view instruction, bool polite) {
  std::string core(instruction);
  for (std::string_view prefix : {"Please ", "please "}) {
    if (core.starts_with(prefix)) {
      core.erase(0, prefix.size());
      break;
    }
  }
  if (core.empty()) return polite ? "Please" : core;
  const auto first = static_cast<unsigned char>(core.front());
  if (!polite) {
    core.front() = static_cast<char>(std::toupper(first));
    return core;
  }
  // Keep acronyms ("DP ...") intact.
  const bool acronym = core.size() > 1 && std::isupper(static_cast<unsigned char>(core[1]));
  if (!acronym) core.front() = static_cast<char>(std::tolower(first));
  return "Please " + core;
}

Conversation render_prompt(const Problem& problem, std::span<const Exemplar> exemplars, const PromptConfig& cfg,
                           const TemplateSet& templates) {
  cfg.validate();
  const Language lang = cfg.translate_first ? Language::bn : cfg.problem_language;
  const std::string_view statement = problem.statement(lang);
  if (statement.empty()) {
    throw ConfigError("problem '" + problem.id + "' has no statement in language '" + std::string(to_string(lang)) +
                      "'");
  }

  Conversation messages;
  if (cfg.instruction_mode == InstructionMode::tailored) {
    if (auto instruction = tailored_instruction(problem.category_or_other(), templates)) {
      messages.push_back({Role::system, apply_politeness(*instruction, cfg.polite)});
    }
  }

  for (const auto& ex : exemplars) {
    std::string_view ex_statement = ex.problem.statement(lang);
    if (ex_statement.empty()) ex_statement = ex.problem.any_statement();
    messages.push_back({Role::user, std::string(ex_statement)});
    messages.push_back({Role::assistant, ex.solution_text});
  }

  // A Bangla problem with English reasoning and no translation step uses the
  // advanced instruction, which asks for English intermediate steps.
  TemplateId effective = cfg.template_id;
  if (effective == TemplateId::base && lang == Language::bn && cfg.reasoning_language == Language::en &&
      !cfg.translate_first) {
    effective = TemplateId::advanced;
  }

  std::string body;
  if (effective == TemplateId::base) {
    const std::pair<std::string_view, std::string_view> values[] = {{"problem", statement}};
    body = substitute(templates.at(lang == Language::bn ? "base" : "base_en"), values);
  } else {
    const std::pair<std::string_view, std::string_view> values[] = {
        {"problem", statement}, {"instruction", templates.at(to_string(effective))}};
    body = substitute(templates.at("instruction_frame"), values);
  }
  if (body.find(kBoxedMarker) == std::string::npos) {
    body += "\n\n";
    body += kBoxedFallback;
  }

  std::string final_message;
  if (cfg.translate_first) {
    final_message = std::string(templates.at("translation")) + "\n\n";
  }
  final_message += body;
  messages.push_back({Role::user, std::move(final_message)});
  return messages;
}

}  // namespace tir
