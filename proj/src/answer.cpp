#include "tir/answer.hpp"

#include <charconv>

namespace tir {

std::string normalize_digits(std::string_view text) {
  // U+09E6..U+09EF encode as E0 A7 A6..AF.
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE0 &&
        static_cast<unsigned char>(text[i + 1]) == 0xA7) {
      const auto third = static_cast<unsigned char>(text[i + 2]);
      if (third >= 0xA6 && third <= 0xAF) {
        out.push_back(static_cast<char>('0' + (third - 0xA6)));
        i += 2;
        continue;
      }
    }
    out.push_back(text[i]);
  }
  return out;
}

std::optional<Answer> validate_answer(std::string_view text) {
  const std::string normalized = normalize_digits(text);
  std::string_view digits = normalized;
  constexpr std::string_view kSpace = " \t\r\n\f\v";
  const auto first = digits.find_first_not_of(kSpace);
  if (first == std::string_view::npos) return std::nullopt;
  digits = digits.substr(first, digits.find_last_not_of(kSpace) - first + 1);

  for (char c : digits) {
    if (c < '0' || c > '9') return std::nullopt;
  }
  Answer value = 0;
  const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{} || end != digits.data() + digits.size()) return std::nullopt;
  return value;
}

}  // namespace tir
