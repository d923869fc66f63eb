#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tir {

/// Contest answers are exact non-negative integers.
using Answer = std::int64_t;

/// Replaces Bangla digits (U+09E6..U+09EF) with ASCII 0-9; everything else is copied.
std::string normalize_digits(std::string_view text);

/// Parses a base-10 non-negative integer after digit normalization and
/// whitespace trimming. Total: returns nullopt for anything else, including
/// signs, separators and values that overflow Answer.
std::optional<Answer> validate_answer(std::string_view text);

}  // namespace tir
