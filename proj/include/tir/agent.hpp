#pragma once

#include <atomic>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tir/answer.hpp"
#include "tir/backend.hpp"
#include "tir/chat.hpp"
#include "tir/executor.hpp"

namespace tir {

/// Fenced ``` blocks in document order. An optional language tag on the
/// opening fence line is dropped; an unterminated final fence yields the rest
/// of the text. Whitespace-only blocks are skipped.
std::vector<std::string> extract_code_blocks(std::string_view text);

/// Integer inside the last complete \boxed{...}, with whitespace and commas
/// removed and Bangla digits normalized. Empty when there is no complete box
/// or its content is not a non-negative integer.
std::optional<Answer> extract_boxed_answer(std::string_view text);

enum class AgentStatus { answered, depth_exhausted, backend_error, aborted };

std::string_view to_string(AgentStatus status);
std::optional<AgentStatus> parse_agent_status(std::string_view name);

struct AgentTrace {
  int agent_id = 0;
  Conversation messages;
  std::vector<ExecutionResult> executions;
  std::optional<Answer> final_answer;
  AgentStatus status = AgentStatus::aborted;
  int turns_used = 0;
  /// Diagnostic for backend_error / aborted.
  std::string error;

  bool operator==(const AgentTrace&) const = default;
};

struct AgentConfig {
  /// Maximum assistant turns, hence maximum code executions.
  int depth = 5;
  GenerationParams generation;
  ExecLimits limits;
  /// Run every block of a turn as one program instead of only the last block.
  bool execute_all_blocks = false;
};

inline constexpr std::size_t kStderrSummaryChars = 2000;

/// Tool message carrying one execution's status and streams.
std::string format_execution(const ExecutionResult& result);
/// Follow-up asking the model to fix a failed execution; quotes at most the
/// last 2000 bytes of stderr.
std::string corrective_message(const ExecutionResult& result);
extern const std::string_view kContinueMessage;

/// One tool-integrated reasoning agent. Each turn: ask the backend, run the
/// last code block, feed the result back. Stops on the first extracted answer
/// (execution stdout before assistant prose), on backend failure, or after
/// `depth` turns. `cancel`, when set, is checked before every turn.
AgentTrace run_agent(int agent_id, const Conversation& prompt, const AgentConfig& cfg, ChatBackend& backend,
                     Executor& executor, const std::atomic<bool>* cancel = nullptr);

/// One-line JSON encoding used for trace files.
std::string trace_to_json(const AgentTrace& trace);
AgentTrace trace_from_json(std::string_view line);

}  // namespace tir
