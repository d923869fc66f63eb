#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "tir/agent.hpp"
#include "tir/answer.hpp"
#include "tir/prompting.hpp"
#include "tir/retrieval.hpp"

namespace tir {

struct BackendSettings {
  std::string url;  // empty: TIR_BACKEND_URL
  int retries = 3;
  int timeout_ms = 120000;
  std::size_t max_in_flight = 16;
};

/// One experiment cell. Every sweep dimension is a single key in the INI
/// config file (see `run_config_keys()`).
struct RunConfig {
  std::string name = "run";
  std::string model;  // empty: TIR_MODEL
  int samples_n = 5;
  int depth_d = 5;
  double temperature = 0.0;
  int max_tokens = 2048;
  std::optional<std::int64_t> seed;
  PromptConfig prompt{.few_shot_count = 2};
  Similarity similarity = Similarity::idf;
  int parallelism = 1;
  int timeout_ms = 10000;
  std::size_t max_output_bytes = 65536;
  bool execute_all_blocks = false;
  std::optional<Answer> fallback_answer;
  std::string templates_file;
  BackendSettings backend;

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
  AgentConfig agent_config() const;
};

/// Recognized "section.key" names, in documentation order.
std::span<const std::string_view> run_config_keys();

/// Sets one "section.key" from its text form. Throws ConfigError.
void set_run_config_value(RunConfig& cfg, std::string_view key, std::string_view value);

/// INI text, then "section.key=value" overrides in order. Validated.
RunConfig parse_run_config(std::string_view ini_text, std::span<const std::string> overrides = {});
RunConfig load_run_config(const std::filesystem::path& path, std::span<const std::string> overrides = {});

/// Experiment settings as echoed in reports (no backend connection details
/// and no template file path).
nlohmann::ordered_json config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& j);

}  // namespace tir
