#include "tir/agent.hpp"

#include <cctype>

#include <json.hpp>

#include "tir/error.hpp"

namespace tir {

namespace {

constexpr std::string_view kStatusNames[] = {"answered", "depth_exhausted", "backend_error", "aborted"};

bool is_tag_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '+' || c == '-' || c == '.' || c == '#';
}

bool is_blank(std::string_view s) { return s.find_first_not_of(" \t\r\n") == std::string_view::npos; }

std::string tail_bytes(std::string_view s, std::size_t n) {
  if (s.size() <= n) return std::string(s);
  std::size_t cut = s.size() - n;
  while (cut < s.size() && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) ++cut;
  return std::string(s.substr(cut));
}

}  // namespace

const std::string_view kContinueMessage =
    "No code was run and no final answer was found. Please continue, verify with Python code, and put your final "
    "integer answer within \\boxed{}.";

std::vector<std::string> extract_code_blocks(std::string_view text) {
  constexpr std::string_view kFence = "```";
  std::vector<std::string> blocks;
  std::size_t pos = 0;
  while (true) {
    const std::size_t open = text.find(kFence, pos);
    if (open == std::string_view::npos) break;
    std::size_t start = open + kFence.size();
    while (start < text.size() && text[start] == '`') ++start;

    // "```lang\n" opens a block on the next line; anything else starts inline.
    std::size_t tag_end = start;
    while (tag_end < text.size() && is_tag_char(text[tag_end])) ++tag_end;
    std::size_t after_tag = tag_end;
    while (after_tag < text.size() && (text[after_tag] == ' ' || text[after_tag] == '\t' || text[after_tag] == '\r')) {
      ++after_tag;
    }
    if (after_tag == text.size()) {
      start = text.size();
    } else if (text[after_tag] == '\n') {
      start = after_tag + 1;
    }

    const std::size_t close = text.find(kFence, start);
    const std::string_view body =
        text.substr(start, close == std::string_view::npos ? std::string_view::npos : close - start);
    if (!is_blank(body)) blocks.emplace_back(body);
    if (close == std::string_view::npos) break;
    pos = close + kFence.size();
  }
  return blocks;
}

std::optional<Answer> extract_boxed_answer(std::string_view text) {
  constexpr std::string_view kBoxed = "\\boxed";
  std::optional<std::string_view> last;
  for (std::size_t pos = text.find(kBoxed); pos != std::string_view::npos; pos = text.find(kBoxed, pos + 1)) {
    std::size_t i = pos + kBoxed.size();
    while (i < text.size() && text[i] == ' ') ++i;
    if (i >= text.size() || text[i] != '{') continue;
    int depth = 0;
    const std::size_t content = i + 1;
    for (; i < text.size(); ++i) {
      if (text[i] == '{') {
        ++depth;
      } else if (text[i] == '}' && --depth == 0) {
        last = text.substr(content, i - content);
        break;
      }
    }
  }
  if (!last) return std::nullopt;
  std::string cleaned;
  for (char c : *last) {
    if (c != ',' && c != ' ' && c != '\t' && c != '\n' && c != '\r') cleaned.push_back(c);
  }
  return validate_answer(cleaned);
}

std::string_view to_string(AgentStatus status) { return kStatusNames[static_cast<std::size_t>(status)]; }

std::optional<AgentStatus> parse_agent_status(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kStatusNames); ++i) {
    if (kStatusNames[i] == name) return static_cast<AgentStatus>(i);
  }
  return std::nullopt;
}

std::string format_execution(const ExecutionResult& result) {
  std::string msg = "Execution status: ";
  msg += to_string(result.status);
  msg += "\nstdout:\n";
  msg += result.std_out;
  msg += "\nstderr:\n";
  msg += result.std_err;
  return msg;
}

std::string corrective_message(const ExecutionResult& result) {
  std::string summary(to_string(result.status));
  const std::size_t last = result.std_err.find_last_not_of(" \t\r\n");
  if (last != std::string::npos) {
    summary += ": ";
    summary += tail_bytes(std::string_view(result.std_err).substr(0, last + 1), kStderrSummaryChars);
  }
  return "execution failed: " + summary + "; please fix and retry";
}

AgentTrace run_agent(int agent_id, const Conversation& prompt, const AgentConfig& cfg, ChatBackend& backend,
                     Executor& executor, const std::atomic<bool>* cancel) {
  if (cfg.depth < 1) throw PreconditionError("agent depth must be at least 1");

  AgentTrace trace;
  trace.agent_id = agent_id;
  trace.messages = prompt;
  trace.status = AgentStatus::depth_exhausted;

  GenerationParams params = cfg.generation;
  if (params.seed) *params.seed += agent_id;

  try {
    for (int turn = 1; turn <= cfg.depth; ++turn) {
      if (cancel != nullptr && cancel->load()) {
        trace.status = AgentStatus::aborted;
        trace.error = "cancelled";
        break;
      }
      std::string reply;
      try {
        reply = backend.chat(trace.messages, params);
      } catch (const BackendError& e) {
        trace.status = AgentStatus::backend_error;
        trace.error = e.what();
        break;
      }
      trace.turns_used = turn;
      trace.messages.push_back({Role::assistant, reply});

      const auto blocks = extract_code_blocks(reply);
      if (blocks.empty()) {
        if ((trace.final_answer = extract_boxed_answer(reply))) break;
        trace.messages.push_back({Role::user, std::string(kContinueMessage)});
        continue;
      }

      std::string code;
      if (cfg.execute_all_blocks) {
        for (const auto& b : blocks) {
          code += b;
          if (!code.ends_with('\n')) code += '\n';
        }
      } else {
        code = blocks.back();
      }
      ExecutionResult result = executor.execute(code, cfg.limits);
      trace.messages.push_back({Role::tool, format_execution(result)});
      const bool ok = result.status == ExecStatus::ok;
      if (!ok) trace.messages.push_back({Role::tool, corrective_message(result)});
      const std::string out = result.std_out;
      trace.executions.push_back(std::move(result));

      if (ok) {
        trace.final_answer = extract_boxed_answer(out);
        if (!trace.final_answer) trace.final_answer = extract_boxed_answer(reply);
        if (trace.final_answer) break;
      }
    }
  } catch (const std::exception& e) {
    trace.status = AgentStatus::aborted;
    trace.error = e.what();
    trace.final_answer.reset();
  }
  if (trace.final_answer) trace.status = AgentStatus::answered;
  return trace;
}

std::string trace_to_json(const AgentTrace& t) {
  nlohmann::ordered_json j;
  j["agent_id"] = t.agent_id;
  j["status"] = std::string(to_string(t.status));
  j["final_answer"] = t.final_answer ? nlohmann::ordered_json(*t.final_answer) : nlohmann::ordered_json(nullptr);
  j["turns_used"] = t.turns_used;
  if (!t.error.empty()) j["error"] = t.error;
  auto& msgs = j["messages"] = nlohmann::ordered_json::array();
  for (const auto& m : t.messages) {
    msgs.push_back({{"role", std::string(to_string(m.role))}, {"content", m.content}});
  }
  auto& execs = j["executions"] = nlohmann::ordered_json::array();
  for (const auto& e : t.executions) {
    execs.push_back({{"status", std::string(to_string(e.status))},
                     {"stdout", e.std_out},
                     {"stderr", e.std_err},
                     {"duration_ms", e.duration_ms}});
  }
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

AgentTrace trace_from_json(std::string_view line) {
  const auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ParseError("malformed trace record", 0);
  AgentTrace t;
  try {
    t.agent_id = j.at("agent_id").get<int>();
    const auto status = parse_agent_status(j.at("status").get<std::string>());
    if (!status) throw ParseError("unknown agent status", 0);
    t.status = *status;
    if (!j.at("final_answer").is_null()) t.final_answer = j["final_answer"].get<Answer>();
    t.turns_used = j.at("turns_used").get<int>();
    if (j.contains("error")) t.error = j["error"].get<std::string>();
    for (const auto& m : j.at("messages")) {
      const auto role = parse_role(m.at("role").get<std::string>());
      if (!role) throw ParseError("unknown message role", 0);
      t.messages.push_back({*role, m.at("content").get<std::string>()});
    }
    for (const auto& e : j.at("executions")) {
      ExecutionResult r;
      const auto st = parse_exec_status(e.at("status").get<std::string>());
      if (!st) throw ParseError("unknown execution status", 0);
      r.status = *st;
      r.std_out = e.at("stdout").get<std::string>();
      r.std_err = e.at("stderr").get<std::string>();
      r.duration_ms = e.at("duration_ms").get<std::int64_t>();
      t.executions.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed trace record: ") + e.what(), 0);
  }
  if ((t.status == AgentStatus::answered) != t.final_answer.has_value()) {
    throw ParseError("trace status and final_answer disagree", 0);
  }
  return t;
}

}  // namespace tir
