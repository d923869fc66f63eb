#include <charconv>
#include <fstream>
#include <iterator>

#include "tir/backend.hpp"
#include "tir/error.hpp"

namespace tir {

namespace {

struct Header {
  std::string matcher;
  bool error = false;
};

std::optional<Header> parse_header(std::string_view line) {
  constexpr std::string_view kOn = "ON ";
  constexpr std::string_view kReply = " REPLY <<<";
  constexpr std::string_view kError = " ERROR <<<";
  if (!line.starts_with(kOn)) return std::nullopt;
  Header h;
  if (line.ends_with(kReply)) {
    h.matcher = line.substr(kOn.size(), line.size() - kOn.size() - kReply.size());
  } else if (line.ends_with(kError)) {
    h.matcher = line.substr(kOn.size(), line.size() - kOn.size() - kError.size());
    h.error = true;
  } else {
    return std::nullopt;
  }
  return h;
}

}  // namespace

bool MockRule::matches(std::string_view last_text, std::size_t sequence) const {
  if (kind == Kind::position) return sequence == position;
  return last_text.find(pattern) != std::string_view::npos;
}

std::string MockRule::describe() const {
  const std::string what = kind == Kind::position ? "#" + std::to_string(position) : "'" + pattern + "'";
  return "rule " + what + " (line " + std::to_string(line) + ")";
}

MockScript parse_mock(std::string_view text) {
  MockScript script;
  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos < text.size();) {
    const std::size_t end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    const std::size_t line_no = i + 1;
    if (line.find_first_not_of(" \t") == std::string_view::npos || line.front() == '#') continue;

    const auto header = parse_header(line);
    if (!header) throw ParseError("expected 'ON <match> REPLY <<<' or 'ON <match> ERROR <<<'", line_no);
    if (header->matcher.empty()) throw ParseError("empty match rule", line_no);

    MockRule rule;
    rule.line = line_no;
    rule.error = header->error;
    const std::string& m = header->matcher;
    if (m.size() > 1 && m.front() == '#' && m.find_first_not_of("0123456789", 1) == std::string::npos) {
      rule.kind = MockRule::Kind::position;
      std::from_chars(m.data() + 1, m.data() + m.size(), rule.position);
      if (rule.position == 0) throw ParseError("positions are 1-based", line_no);
    } else {
      rule.pattern = m;
    }

    std::size_t j = i + 1;
    std::string body;
    bool closed = false;
    for (; j < lines.size(); ++j) {
      if (lines[j] == ">>>") {
        closed = true;
        break;
      }
      if (j > i + 1) body += '\n';
      body += lines[j];
    }
    if (!closed) throw ParseError("reply block is not closed with '>>>'", line_no);
    rule.reply = std::move(body);
    script.rules.push_back(std::move(rule));
    i = j;
  }
  return script;
}

MockScript load_mock(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open mock script " + path.string());
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_mock(text);
}

MockBackend::MockBackend(MockScript script) : script_(std::move(script)) {}

std::size_t MockBackend::request_count() const {
  std::lock_guard lock(mutex_);
  return sequence_;
}

std::vector<MockBackend::Exchange> MockBackend::transcript() const {
  std::lock_guard lock(mutex_);
  return transcript_;
}

std::string MockBackend::complete(std::span<const ChatMessage> messages, const GenerationParams&) {
  const std::string& last = messages.back().content;
  std::lock_guard lock(mutex_);
  const std::size_t sequence = ++sequence_;

  const MockRule* hit = nullptr;
  for (const auto& rule : script_.rules) {
    if (!rule.matches(last, sequence)) continue;
    if (hit != nullptr) {
      throw MockScriptError("ambiguous mock request #" + std::to_string(sequence) + ": matched by " + hit->describe() +
                            " and " + rule.describe());
    }
    hit = &rule;
  }
  if (hit == nullptr) throw MockScriptError("no mock rule matches request #" + std::to_string(sequence));

  transcript_.push_back({sequence, last, hit->error ? "ERROR: " + hit->reply : hit->reply});
  if (hit->error) throw ProtocolError(500, hit->reply);
  return hit->reply;
}

}  // namespace tir
