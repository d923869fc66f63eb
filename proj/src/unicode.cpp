#include "unicode.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "tir/error.hpp"

namespace tir::unicode {

namespace {

const icu::Normalizer2& nfc() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || n == nullptr) throw Error("ICU NFC normalizer unavailable");
  return *n;
}

icu::UnicodeString normalized_ustring(std::string_view utf8) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  s.toLower(icu::Locale::getRoot());
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString out = nfc().normalize(s, status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");
  return out;
}

bool is_word_char(UChar32 c) {
  return u_isalnum(c) || (U_GET_GC_MASK(c) & U_GC_M_MASK) != 0;
}

std::string to_utf8(const icu::UnicodeString& s) {
  std::string out;
  s.toUTF8String(out);
  return out;
}

}  // namespace

std::string normalize(std::string_view utf8) {
  const icu::UnicodeString s = normalized_ustring(utf8);
  int32_t begin = 0;
  int32_t end = s.length();
  while (begin < end && u_isUWhiteSpace(s.char32At(begin))) begin = s.moveIndex32(begin, 1);
  while (end > begin) {
    const int32_t prev = s.moveIndex32(end, -1);
    if (!u_isUWhiteSpace(s.char32At(prev))) break;
    end = prev;
  }
  return to_utf8(s.tempSubStringBetween(begin, end));
}

std::vector<std::string> words(std::string_view utf8) {
  const icu::UnicodeString s = normalized_ustring(utf8);
  std::vector<std::string> out;
  int32_t start = -1;
  for (int32_t i = 0; i < s.length(); i = s.moveIndex32(i, 1)) {
    if (is_word_char(s.char32At(i))) {
      if (start < 0) start = i;
    } else if (start >= 0) {
      out.push_back(to_utf8(s.tempSubStringBetween(start, i)));
      start = -1;
    }
  }
  if (start >= 0) out.push_back(to_utf8(s.tempSubStringBetween(start, s.length())));
  return out;
}

std::size_t codepoint_count(std::string_view utf8) {
  return static_cast<std::size_t>(
      icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size()))).countChar32());
}

}  // namespace tir::unicode
