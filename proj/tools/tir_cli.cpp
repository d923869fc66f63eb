// tir: run, score and tabulate tool-integrated reasoning experiments.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tir/backend.hpp"
#include "tir/conformance.hpp"
#include "tir/config.hpp"
#include "tir/corpus.hpp"
#include "tir/error.hpp"
#include "tir/executor.hpp"
#include "tir/harness.hpp"
#include "tir/report.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

std::unique_ptr<tir::ChatBackend> make_backend(const std::string& mock_script, const tir::BackendSettings& settings) {
  if (!mock_script.empty()) return std::make_unique<tir::MockBackend>(tir::load_mock(mock_script));
  tir::HttpBackendConfig http = tir::HttpBackendConfig::from_env();
  if (!settings.url.empty()) http.url = settings.url;
  if (http.url.empty()) throw tir::ConfigError("no backend: pass --mock-script, set backend.url or TIR_BACKEND_URL");
  http.retries = settings.retries;
  http.request_timeout = std::chrono::milliseconds(settings.timeout_ms);
  http.max_in_flight = settings.max_in_flight;
  return std::make_unique<tir::HttpBackend>(std::move(http));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw tir::ConfigError("cannot write " + path.string());
  out << text;
}

struct RunArgs {
  std::string corpus, exemplars, config, gold, runner_cmd, mock_script, out = "runs";
  bool stub = false;
  std::vector<std::string> overrides;
  std::optional<int> parallelism;
};

int cmd_run(const RunArgs& a) {
  std::vector<std::string> overrides = a.overrides;
  if (a.parallelism) overrides.push_back("run.parallelism=" + std::to_string(*a.parallelism));
  tir::RunConfig cfg = tir::load_run_config(a.config, overrides);
  if (cfg.model.empty()) {
    if (const char* m = std::getenv("TIR_MODEL")) cfg.model = m;
  }

  const tir::Corpus corpus = tir::load_corpus(a.corpus);
  const tir::Corpus exemplars = a.exemplars.empty() ? tir::Corpus("none", {}) : tir::load_corpus(a.exemplars);
  std::optional<tir::GoldMap> gold;
  if (!a.gold.empty()) gold = tir::load_gold(a.gold);

  auto backend = make_backend(a.mock_script, cfg.backend);
  std::unique_ptr<tir::Executor> executor;
  if (a.stub) {
    executor = std::make_unique<tir::StubExecutor>();
  } else {
    executor = std::make_unique<tir::WorkerPoolExecutor>(a.runner_cmd);
  }

  tir::RunOptions opts;
  opts.out_dir = a.out;
  opts.gold = gold ? &*gold : nullptr;
  opts.progress = [](std::string_view id, std::size_t done, std::size_t total) {
    std::cerr << "[" << done << "/" << total << "] " << id << "\n";
  };
  const tir::ScoreReport report = tir::run(corpus, exemplars, cfg, *backend, *executor, opts);
  for (const auto& note : report.notes) std::cerr << "note: " << note << "\n";
  std::cout << "run " << report.run_id << ": " << report.correct_count << " / " << report.total
            << " correct, accuracy " << report.accuracy << "\n"
            << "report: " << (std::filesystem::path(a.out) / "reports" / (report.run_id + ".json")).string() << "\n";
  return 0;
}

int cmd_score(const std::string& predictions, const std::string& gold) {
  const tir::Score s = tir::score(tir::load_predictions(predictions), tir::load_gold(gold));
  nlohmann::ordered_json j;
  j["correct"] = s.correct;
  j["total"] = s.total;
  j["accuracy"] = s.accuracy;
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_report(const std::string& runs, const std::string& out) {
  const auto reports = tir::load_reports(runs);
  const tir::ReportTable table = tir::report_table(reports);
  const std::filesystem::path dir = out.empty() ? std::filesystem::path(runs) : std::filesystem::path(out);
  std::filesystem::create_directories(dir);
  write_text(dir / "table.txt", table.text);
  write_text(dir / "table.csv", table.csv);
  std::cout << table.text;
  return 0;
}

int cmd_augment(const std::string& corpus_path, int k, const std::string& mock_script, const std::string& out,
                const std::string& model) {
  const tir::Corpus corpus = tir::load_corpus(corpus_path);
  tir::BackendSettings settings;
  auto backend = make_backend(mock_script, settings);
  tir::GenerationParams params;
  params.temperature = 0.7;
  params.model_name = model;
  if (params.model_name.empty()) {
    if (const char* m = std::getenv("TIR_MODEL")) params.model_name = m;
  }

  std::vector<tir::Problem> generated;
  for (const auto& p : corpus) {
    const std::string reply = backend->chat(tir::build_augmentation_prompt(p, k), params);
    const auto items = tir::parse_augmentation_reply(reply, k);
    if (items.size() < static_cast<std::size_t>(k)) {
      std::cerr << p.id << ": got " << items.size() << " of " << k << " variants\n";
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
      tir::Problem v;
      v.id = p.id + "-aug" + std::to_string(i + 1);
      if (!p.statement_bn.empty()) {
        v.statement_bn = items[i];
      } else {
        v.statement_en = items[i];
      }
      v.answer = p.answer;
      v.category = p.category;
      v.keywords = p.keywords;
      v.extra["augmented_from"] = p.id;
      generated.push_back(std::move(v));
    }
  }
  const tir::Corpus result(corpus.name() + "-augmented", std::move(generated));
  if (out.empty()) {
    tir::save_corpus(result, std::cout);
  } else {
    tir::save_corpus(result, std::filesystem::path(out));
  }
  return 0;
}

int cmd_conformance(const std::string& runner_cmd) {
  const auto cases = tir::run_conformance(runner_cmd);
  bool all = true;
  for (const auto& c : cases) {
    all = all && c.passed;
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.wall_ms << " ms)"
              << (c.detail.empty() ? "" : ": " + c.detail) << "\n";
  }
  return all ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tool-integrated reasoning agents with retrieval and majority voting"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Solve a corpus and write traces plus a score report");
  run->add_option("--corpus", run_args.corpus, "Problems to solve (JSONL)")->required()->check(CLI::ExistingFile);
  run->add_option("--exemplars", run_args.exemplars, "Solved problems for few-shot retrieval (JSONL)")
      ->check(CLI::ExistingFile);
  run->add_option("--config", run_args.config, "Run configuration (INI)")->required()->check(CLI::ExistingFile);
  run->add_option("--gold", run_args.gold, "Gold answers (JSONL of id/answer)")->check(CLI::ExistingFile);
  auto* runner = run->add_option("--runner-cmd", run_args.runner_cmd, "Execution worker command");
  auto* stub = run->add_flag("--stub-executor", run_args.stub, "Use the in-process stub executor");
  runner->excludes(stub);
  run->add_option("--mock-script", run_args.mock_script, "Scripted backend instead of HTTP")
      ->check(CLI::ExistingFile);
  run->add_option("--out", run_args.out, "Output directory")->capture_default_str();
  run->add_option("--set", run_args.overrides, "Config override section.key=value (repeatable)");
  run->add_option("--parallelism", run_args.parallelism, "Concurrent agents across the run")
      ->check(CLI::PositiveNumber);

  std::string predictions, gold;
  auto* score = app.add_subcommand("score", "Exact-match accuracy of a predictions file");
  score->add_option("--predictions", predictions)->required()->check(CLI::ExistingFile);
  score->add_option("--gold", gold)->required()->check(CLI::ExistingFile);

  std::string runs_dir, table_out;
  auto* report = app.add_subcommand("report", "Tabulate every report under a runs directory");
  report->add_option("--runs", runs_dir)->required();
  report->add_option("--out", table_out, "Where table.txt and table.csv go (default: --runs)");

  std::string aug_corpus, aug_mock, aug_out, aug_model;
  int aug_k = 5;
  bool live = false;
  auto* augment = app.add_subcommand("augment", "Generate paraphrased variants of each problem");
  augment->add_option("--corpus", aug_corpus)->required()->check(CLI::ExistingFile);
  augment->add_option("--k", aug_k, "Variants per problem")->capture_default_str()->check(CLI::PositiveNumber);
  auto* aug_mock_opt = augment->add_option("--mock-script", aug_mock)->check(CLI::ExistingFile);
  auto* live_opt = augment->add_flag("--live", live, "Use the HTTP backend from the environment");
  aug_mock_opt->excludes(live_opt);
  augment->add_option("--out", aug_out, "Output corpus (default: stdout)");
  augment->add_option("--model", aug_model, "Model name (default: TIR_MODEL)");

  std::string conf_cmd;
  auto* conformance = app.add_subcommand("conformance", "Protocol test suite against an execution worker");
  conformance->add_option("--runner-cmd", conf_cmd)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (run->parsed()) {
      if (run_args.runner_cmd.empty() && !run_args.stub) {
        throw tir::ConfigError("choose an executor: --runner-cmd CMD or --stub-executor");
      }
      return cmd_run(run_args);
    }
    if (score->parsed()) return cmd_score(predictions, gold);
    if (report->parsed()) return cmd_report(runs_dir, table_out);
    if (augment->parsed()) {
      if (aug_mock.empty() && !live) throw tir::ConfigError("augment needs --mock-script F or --live");
      return cmd_augment(aug_corpus, aug_k, aug_mock, aug_out, aug_model);
    }
    if (conformance->parsed()) return cmd_conformance(conf_cmd);
  } catch (const tir::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const tir::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
