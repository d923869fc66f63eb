#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace tir::unicode {

/// NFC, lowercased, with surrounding Unicode whitespace removed.
std::string normalize(std::string_view utf8);

/// Maximal runs of letters, digits and combining marks, each normalized.
std::vector<std::string> words(std::string_view utf8);

std::size_t codepoint_count(std::string_view utf8);

}  // namespace tir::unicode
