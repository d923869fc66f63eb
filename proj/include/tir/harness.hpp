#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "tir/answer.hpp"
#include "tir/backend.hpp"
#include "tir/config.hpp"
#include "tir/corpus.hpp"
#include "tir/error.hpp"
#include "tir/executor.hpp"
#include "tir/prompting.hpp"
#include "tir/report.hpp"

namespace tir {

using GoldMap = std::map<std::string, Answer, std::less<>>;
using PredictionMap = std::map<std::string, Answer, std::less<>>;

struct Score {
  int correct = 0;
  int total = 0;
  double accuracy = 0.0;

  bool operator==(const Score&) const = default;
};

/// Exact integer match. Missing predictions are wrong; a predicted id that is
/// not in `gold` is a ConfigError naming it.
Score score(const PredictionMap& predictions, const GoldMap& gold);

/// Labeled entries of a corpus.
GoldMap gold_from_corpus(const Corpus& corpus);

/// JSONL, one {"id": ..., "answer": ...} per line. Answers may be integers or
/// digit strings. In prediction files a null answer means "no prediction".
GoldMap load_gold(const std::filesystem::path& path);
PredictionMap load_predictions(const std::filesystem::path& path);

/// Content address of a run: 16 hex digits of SHA-256 over the report config
/// (without parallelism), both corpora and the template texts.
std::string compute_run_id(const RunConfig& cfg, const Corpus& corpus, const Corpus& exemplars,
                           const TemplateSet& templates);

/// File name used for a problem's trace file (without the .log suffix).
std::string trace_file_stem(std::string_view problem_id);

struct RunOptions {
  std::filesystem::path out_dir = "runs";
  /// Overrides the corpus labels when set.
  const GoldMap* gold = nullptr;
  bool probe_backend = true;
  /// Simulated crash: stop launching work once this many problems have their
  /// traces written in this invocation, then throw RunInterrupted.
  std::optional<std::size_t> stop_after_problems;
  /// Called (serialized) whenever a problem's traces are complete.
  std::function<void(std::string_view problem_id, std::size_t done, std::size_t total)> progress;
};

class RunInterrupted : public Error {
 public:
  using Error::Error;
};

/// Retrieve, render, run samples_n agents per problem on at most
/// `parallelism` threads, vote and score. Traces land in
/// `<out>/traces/<run_id>/` as each problem completes and are reused on the
/// next invocation; the report is written to `<out>/reports/<run_id>.json`.
ScoreReport run(const Corpus& corpus, const Corpus& exemplars, const RunConfig& cfg, ChatBackend& backend,
                Executor& executor, const RunOptions& opts = {});

/// Writes `content` next to `path` and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace tir
