#include "tir/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <iterator>

#include "tir/error.hpp"

namespace tir {

namespace {

constexpr std::array<std::string_view, 13> kColumns = {
    "name",     "model",       "samples",  "depth",    "temperature", "problem_lang", "reasoning_lang",
    "translate", "instruction", "few_shot", "polite",   "score",       "accuracy"};

std::string format_real(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, end) : std::to_string(v);
}

std::string format_fixed(double v, int digits) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  return ec == std::errc{} ? std::string(buf, end) : std::to_string(v);
}

std::size_t display_width(std::string_view s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> row_of(const ScoreReport& r) {
  const RunConfig& c = r.config;
  return {c.name,
          c.model.empty() ? "-" : c.model,
          std::to_string(c.samples_n),
          std::to_string(c.depth_d),
          format_real(c.temperature),
          std::string(to_string(c.prompt.problem_language)),
          std::string(to_string(c.prompt.reasoning_language)),
          c.prompt.translate_first ? "yes" : "no",
          std::string(to_string(c.prompt.instruction_mode)),
          std::to_string(c.prompt.few_shot_count),
          c.prompt.polite ? "yes" : "no",
          std::to_string(r.correct_count) + " / " + std::to_string(r.total),
          format_fixed(r.accuracy, 4)};
}

nlohmann::ordered_json optional_answer(const std::optional<Answer>& a) {
  return a ? nlohmann::ordered_json(*a) : nlohmann::ordered_json(nullptr);
}

}  // namespace

nlohmann::ordered_json report_to_json(const ScoreReport& r) {
  nlohmann::ordered_json j;
  j["run_id"] = r.run_id;
  j["config"] = config_to_json(r.config);
  auto& rows = j["per_problem"] = nlohmann::ordered_json::array();
  for (const auto& p : r.per_problem) {
    nlohmann::ordered_json row;
    row["id"] = p.id;
    row["elected"] = optional_answer(p.elected);
    row["gold"] = optional_answer(p.gold);
    row["correct"] = p.correct;
    auto& tally = row["tally"] = nlohmann::ordered_json::object();
    for (const auto& [answer, count] : p.tally) tally[std::to_string(answer)] = count;
    row["valid_votes"] = p.valid_votes;
    row["total_agents"] = p.total_agents;
    row["fallback_used"] = p.fallback_used;
    if (!p.error.empty()) row["error"] = p.error;
    rows.push_back(std::move(row));
  }
  j["correct_count"] = r.correct_count;
  j["total"] = r.total;
  j["accuracy"] = r.accuracy;
  j["notes"] = r.notes;
  j["wall_time_s"] = r.wall_time_s;
  return j;
}

ScoreReport report_from_json(const nlohmann::json& j) {
  ScoreReport r;
  try {
    r.run_id = j.at("run_id").get<std::string>();
    r.config = config_from_json(j.at("config"));
    for (const auto& row : j.at("per_problem")) {
      ProblemOutcome p;
      p.id = row.at("id").get<std::string>();
      if (!row.at("elected").is_null()) p.elected = row["elected"].get<Answer>();
      if (!row.at("gold").is_null()) p.gold = row["gold"].get<Answer>();
      p.correct = row.at("correct").get<bool>();
      for (const auto& [answer, count] : row.at("tally").items()) {
        const auto a = validate_answer(answer);
        if (!a) throw ParseError("bad tally key '" + answer + "'", 0);
        p.tally[*a] = count.get<int>();
      }
      p.valid_votes = row.at("valid_votes").get<int>();
      p.total_agents = row.at("total_agents").get<int>();
      p.fallback_used = row.at("fallback_used").get<bool>();
      if (row.contains("error")) p.error = row["error"].get<std::string>();
      r.per_problem.push_back(std::move(p));
    }
    r.correct_count = j.at("correct_count").get<int>();
    r.total = j.at("total").get<int>();
    r.accuracy = j.at("accuracy").get<double>();
    r.notes = j.at("notes").get<std::vector<std::string>>();
    r.wall_time_s = j.at("wall_time_s").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what(), 0);
  }
  return r;
}

std::string serialize_report(const ScoreReport& report) { return report_to_json(report).dump(2) + "\n"; }

ScoreReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open report " + path.string());
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("report " + path.string() + " is not JSON", 0);
  return report_from_json(j);
}

std::vector<ScoreReport> load_reports(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  const fs::path root = fs::is_directory(dir / "reports") ? dir / "reports" : dir;
  if (!fs::is_directory(root)) throw ConfigError("runs directory " + dir.string() + " does not exist");
  std::vector<ScoreReport> reports;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") reports.push_back(load_report(entry.path()));
  }
  std::sort(reports.begin(), reports.end(), [](const ScoreReport& a, const ScoreReport& b) {
    if (a.config.name != b.config.name) return a.config.name < b.config.name;
    return a.run_id < b.run_id;
  });
  return reports;
}

ReportTable report_table(std::span<const ScoreReport> reports) {
  std::vector<std::vector<std::string>> rows;
  rows.emplace_back(kColumns.begin(), kColumns.end());
  for (const auto& r : reports) rows.push_back(row_of(r));

  std::vector<std::size_t> width(kColumns.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], display_width(row[c]));
  }

  ReportTable table;
  const auto emit = [&](const std::vector<std::string>& row) {
    std::string line = "|";
    for (std::size_t c = 0; c < row.size(); ++c) {
      line += ' ' + row[c] + std::string(width[c] - display_width(row[c]), ' ') + " |";
    }
    table.text += line + "\n";
  };
  emit(rows.front());
  std::string rule = "|";
  for (std::size_t w : width) rule += std::string(w + 2, '-') + "|";
  table.text += rule + "\n";
  for (std::size_t i = 1; i < rows.size(); ++i) emit(rows[i]);

  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) table.csv += ',';
      table.csv += csv_field(row[c]);
    }
    table.csv += '\n';
  }
  return table;
}

}  // namespace tir
