#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tir/chat.hpp"
#include "tir/corpus.hpp"
#include "tir/retrieval.hpp"

namespace tir {

enum class InstructionMode { none, tailored };
enum class TemplateId { base, advanced, step_by_step };

std::string_view to_string(InstructionMode mode);
std::optional<InstructionMode> parse_instruction_mode(std::string_view name);
std::string_view to_string(TemplateId id);
std::optional<TemplateId> parse_template_id(std::string_view name);

inline constexpr int kMaxFewShot = 5;

struct PromptConfig {
  Language problem_language = Language::bn;
  Language reasoning_language = Language::bn;
  bool translate_first = false;
  InstructionMode instruction_mode = InstructionMode::none;
  bool polite = false;
  int few_shot_count = 0;
  TemplateId template_id = TemplateId::base;

  /// translate_first requires a Bangla problem; few_shot_count in [0, 5].
  void validate() const;

  bool operator==(const PromptConfig&) const = default;
};

/// Named prompt templates read from a text file of `--- <id> ---` sections.
/// Keeps the raw bytes so `serialize()` reproduces the file exactly.
class TemplateSet {
 public:
  static TemplateSet parse(std::string_view text);
  static TemplateSet load(const std::filesystem::path& path);
  /// The set compiled in from data/templates.txt.
  static const TemplateSet& defaults();

  std::string serialize() const;

  /// Template body without its trailing newlines.
  std::optional<std::string_view> find(std::string_view id) const;
  /// Like find(), but a missing template is a ConfigError.
  std::string_view at(std::string_view id) const;
  std::vector<std::string> ids() const;

 private:
  std::string preamble_;
  struct Section {
    std::string id;
    std::string header;  // raw header line, terminator included
    std::string body;
  };
  std::vector<Section> sections_;
};

/// Replaces each `{name}` token from `values` in one left-to-right pass;
/// substituted text is never rescanned and unknown braces are left alone.
std::string substitute(std::string_view tmpl, std::span<const std::pair<std::string_view, std::string_view>> values);

/// Category-specific solving hint; empty for Algebra and Other.
std::optional<std::string> tailored_instruction(Category category,
                                                const TemplateSet& templates = TemplateSet::defaults());

/// Politeness toggle for an instruction. Off: any leading "Please " is dropped
/// and the first letter capitalized. On: "Please " + the off form with its
/// first letter lowercased.
std::string apply_politeness(std::string_view instruction, bool polite);

/// [system instruction?] + [user/assistant per exemplar] + final user message.
/// The final message always carries the \boxed{} answer instruction.
Conversation render_prompt(const Problem& problem, std::span<const Exemplar> exemplars, const PromptConfig& cfg,
                           const TemplateSet& templates = TemplateSet::defaults());

}  // namespace tir
