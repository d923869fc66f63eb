#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tir/answer.hpp"
#include "tir/config.hpp"

namespace tir {

struct ProblemOutcome {
  std::string id;
  std::optional<Answer> elected;
  std::optional<Answer> gold;
  bool correct = false;
  std::map<Answer, int> tally;
  int valid_votes = 0;
  int total_agents = 0;
  bool fallback_used = false;
  /// Set when the problem could not be attempted (e.g. prompt rendering failed).
  std::string error;

  bool operator==(const ProblemOutcome&) const = default;
};

struct ScoreReport {
  std::string run_id;
  RunConfig config;
  std::vector<ProblemOutcome> per_problem;
  int correct_count = 0;
  int total = 0;
  double accuracy = 0.0;
  std::vector<std::string> notes;
  double wall_time_s = 0.0;
};

nlohmann::ordered_json report_to_json(const ScoreReport& report);
ScoreReport report_from_json(const nlohmann::json& j);

/// Pretty-printed JSON plus a trailing newline; key order is fixed.
std::string serialize_report(const ScoreReport& report);
ScoreReport load_report(const std::filesystem::path& path);

/// Every `*.json` report under `<dir>/reports` (or `dir` itself when it has no
/// reports/ subdirectory), sorted by config name then run id.
std::vector<ScoreReport> load_reports(const std::filesystem::path& dir);

struct ReportTable {
  std::string text;  // aligned, pipe-delimited
  std::string csv;   // machine-readable twin
};

/// One row per report in the given order; columns are fixed.
ReportTable report_table(std::span<const ScoreReport> reports);

}  // namespace tir
