#include <json.hpp>

#include "tir/error.hpp"
#include "tir/executor.hpp"

namespace tir {

namespace {

constexpr std::string_view kStatusNames[] = {"ok", "nonzero_exit", "timeout", "runner_failure"};

const nlohmann::json& field(const nlohmann::json& obj, const char* key) {
  if (!obj.contains(key)) throw ParseError(std::string("missing field '") + key + "'", 0);
  return obj[key];
}

nlohmann::json parse_object(std::string_view line, const char* what) {
  auto parsed = nlohmann::json::parse(line, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object()) throw ParseError(std::string("malformed ") + what, 0);
  return parsed;
}

}  // namespace

std::string_view to_string(ExecStatus status) { return kStatusNames[static_cast<std::size_t>(status)]; }

std::optional<ExecStatus> parse_exec_status(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kStatusNames); ++i) {
    if (kStatusNames[i] == name) return static_cast<ExecStatus>(i);
  }
  return std::nullopt;
}

std::string truncate_output(std::string text, std::size_t max_bytes) {
  if (text.size() <= max_bytes) return text;
  std::size_t cut = max_bytes;
  // Back off continuation bytes (10xxxxxx) so the cut lands on a boundary.
  while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
  text.resize(cut);
  text += kTruncationMarker;
  return text;
}

void ExecJob::validate() const {
  if (timeout_ms <= 0 || timeout_ms > kMaxTimeoutMs) {
    throw PreconditionError("timeout_ms must be in (0, " + std::to_string(kMaxTimeoutMs) + "], got " +
                            std::to_string(timeout_ms));
  }
  if (max_output_bytes == 0 || max_output_bytes > kMaxOutputBytes) {
    throw PreconditionError("max_output_bytes must be in (0, 1 MiB], got " + std::to_string(max_output_bytes));
  }
}

std::string encode_job(const ExecJob& job) {
  nlohmann::ordered_json j;
  j["id"] = job.id;
  j["code"] = job.code;
  j["timeout_ms"] = job.timeout_ms;
  j["max_output_bytes"] = job.max_output_bytes;
  if (job.restricted) j["restricted"] = true;
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

ExecJob decode_job(std::string_view line) {
  const auto j = parse_object(line, "job");
  ExecJob job;
  try {
    job.id = field(j, "id").get<std::string>();
    job.code = field(j, "code").get<std::string>();
    job.timeout_ms = field(j, "timeout_ms").get<int>();
    job.max_output_bytes = field(j, "max_output_bytes").get<std::size_t>();
    if (j.contains("restricted")) job.restricted = j["restricted"].get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad job field: ") + e.what(), 0);
  }
  return job;
}

std::string encode_reply(const ExecReply& reply) {
  nlohmann::ordered_json j;
  j["id"] = reply.id;
  j["stdout"] = reply.result.std_out;
  j["stderr"] = reply.result.std_err;
  j["status"] = std::string(to_string(reply.result.status));
  j["duration_ms"] = reply.result.duration_ms;
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

ExecReply decode_reply(std::string_view line) {
  const auto j = parse_object(line, "reply");
  ExecReply reply;
  try {
    reply.id = field(j, "id").get<std::string>();
    reply.result.std_out = field(j, "stdout").get<std::string>();
    reply.result.std_err = field(j, "stderr").get<std::string>();
    const auto status = parse_exec_status(field(j, "status").get<std::string>());
    if (!status) throw ParseError("unknown status '" + j["status"].get<std::string>() + "'", 0);
    reply.result.status = *status;
    reply.result.duration_ms = field(j, "duration_ms").get<std::int64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad reply field: ") + e.what(), 0);
  }
  return reply;
}

}  // namespace tir
