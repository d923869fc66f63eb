#include "tir/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iterator>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <json.hpp>

#include "tir/consensus.hpp"
#include "tir/error.hpp"
#include "tir/hashing.hpp"

namespace tir {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(std::string("cannot open ") + what + " " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

template <typename Fn>
void for_each_record(const fs::path& path, const char* what, Fn&& fn) {
  std::istringstream in(read_file(path, what));
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ParseError("malformed record", line);
    if (!j.contains("id") || !j["id"].is_string()) throw ParseError("record needs a string 'id'", line);
    fn(j, line);
  }
}

std::optional<Answer> answer_field(const nlohmann::json& j, std::size_t line) {
  const auto it = j.find("answer");
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (it->is_number_unsigned()) {
    const auto a = validate_answer(std::to_string(it->get<std::uint64_t>()));
    if (a) return a;
  } else if (it->is_number_integer()) {
    if (it->get<std::int64_t>() >= 0) return it->get<std::int64_t>();
  } else if (it->is_string()) {
    if (const auto a = validate_answer(it->get<std::string>())) return a;
  }
  throw ParseError("'answer' must be a non-negative integer", line);
}

std::string corpus_digest(const Corpus& corpus) {
  std::string text;
  for (const auto& p : corpus) text += to_record(p) + "\n";
  return sha256_hex(text);
}

std::vector<AgentTrace> load_traces(const fs::path& path, int samples) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::vector<AgentTrace> traces;
  std::string line;
  try {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      traces.push_back(trace_from_json(line));
    }
  } catch (const Error&) {
    return {};
  }
  if (traces.size() != static_cast<std::size_t>(samples)) return {};
  for (int i = 0; i < samples; ++i) {
    if (traces[static_cast<std::size_t>(i)].agent_id != i) return {};
  }
  return traces;
}

struct ProblemState {
  const Problem* problem = nullptr;
  Conversation prompt;
  std::string render_error;
  std::vector<AgentTrace> traces;
  std::atomic<int> remaining{0};
  bool resumed = false;
};

}  // namespace

Score score(const PredictionMap& predictions, const GoldMap& gold) {
  Score s;
  s.total = static_cast<int>(gold.size());
  for (const auto& [id, answer] : predictions) {
    const auto it = gold.find(id);
    if (it == gold.end()) throw ConfigError("prediction for '" + id + "' has no gold answer");
    if (it->second == answer) ++s.correct;
  }
  s.accuracy = s.total > 0 ? static_cast<double>(s.correct) / s.total : 0.0;
  return s;
}

GoldMap gold_from_corpus(const Corpus& corpus) {
  GoldMap gold;
  for (const auto& p : corpus) {
    if (p.answer) gold.emplace(p.id, *p.answer);
  }
  return gold;
}

GoldMap load_gold(const fs::path& path) {
  GoldMap gold;
  for_each_record(path, "gold file", [&](const nlohmann::json& j, std::size_t line) {
    const auto a = answer_field(j, line);
    if (!a) throw ParseError("gold record has no answer", line);
    if (!gold.emplace(j["id"].get<std::string>(), *a).second) {
      throw ParseError("duplicate id '" + j["id"].get<std::string>() + "'", line);
    }
  });
  return gold;
}

PredictionMap load_predictions(const fs::path& path) {
  PredictionMap preds;
  std::set<std::string> seen;
  for_each_record(path, "predictions file", [&](const nlohmann::json& j, std::size_t line) {
    const auto id = j["id"].get<std::string>();
    if (!seen.insert(id).second) throw ParseError("duplicate id '" + id + "'", line);
    if (const auto a = answer_field(j, line)) preds.emplace(id, *a);
  });
  return preds;
}

std::string compute_run_id(const RunConfig& cfg, const Corpus& corpus, const Corpus& exemplars,
                           const TemplateSet& templates) {
  nlohmann::ordered_json j;
  j["config"] = config_to_json(cfg);
  j["config"].erase("parallelism");
  j["corpus"] = corpus_digest(corpus);
  j["exemplars"] = corpus_digest(exemplars);
  j["templates"] = sha256_hex(templates.serialize());
  return sha256_hex(j.dump()).substr(0, 16);
}

std::string trace_file_stem(std::string_view problem_id) {
  std::string stem;
  for (char c : problem_id) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    stem += keep ? c : '_';
  }
  if (stem != problem_id || stem.starts_with('.')) stem += "-" + sha256_hex(problem_id).substr(0, 8);
  return stem;
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  static std::atomic<unsigned> counter{0};
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

ScoreReport run(const Corpus& corpus, const Corpus& exemplars, const RunConfig& cfg, ChatBackend& backend,
                Executor& executor, const RunOptions& opts) {
  const auto started = std::chrono::steady_clock::now();
  cfg.validate();
  if (corpus.size() == 0) throw ConfigError("corpus '" + corpus.name() + "' is empty");

  const GoldMap gold = opts.gold ? *opts.gold : gold_from_corpus(corpus);
  for (const auto& p : corpus) {
    if (!gold.contains(p.id)) throw ConfigError("problem '" + p.id + "' has no gold answer");
  }

  std::optional<TemplateSet> loaded;
  if (!cfg.templates_file.empty()) loaded = TemplateSet::load(cfg.templates_file);
  const TemplateSet& templates = loaded ? *loaded : TemplateSet::defaults();

  ScoreReport report;
  report.run_id = compute_run_id(cfg, corpus, exemplars, templates);
  report.config = cfg;

  const SolutionMap solutions = solutions_of(exemplars);
  std::vector<Problem> solved;
  for (const auto& p : exemplars) {
    if (solutions.contains(p.id)) solved.push_back(p);
  }
  const Corpus pool(exemplars.name(), std::move(solved));
  const KeywordIndex index(pool);
  if (cfg.prompt.few_shot_count > 0 && pool.size() == 0) {
    report.notes.push_back("exemplar corpus has no solved problems; prompts are zero-shot");
  }

  const fs::path trace_dir = opts.out_dir / "traces" / report.run_id;
  fs::create_directories(trace_dir);

  std::vector<ProblemState> states(corpus.size());
  struct Task {
    std::size_t problem;
    int agent;
  };
  std::vector<Task> tasks;
  std::size_t i = 0;
  for (const auto& p : corpus) {
    ProblemState& st = states[i];
    st.problem = &p;
    try {
      const auto ranked = similar(index, p.id, problem_keywords(p), cfg.prompt.few_shot_count, cfg.similarity);
      const auto shots = to_exemplars(ranked, pool, solutions);
      st.prompt = render_prompt(p, shots, cfg.prompt, templates);
    } catch (const Error& e) {
      st.render_error = e.what();
    }
    if (st.render_error.empty()) {
      st.traces = load_traces(trace_dir / (trace_file_stem(p.id) + ".log"), cfg.samples_n);
      if (!st.traces.empty()) {
        st.resumed = true;
      } else {
        st.traces.resize(static_cast<std::size_t>(cfg.samples_n));
        st.remaining = cfg.samples_n;
        for (int a = 0; a < cfg.samples_n; ++a) tasks.push_back({i, a});
      }
    }
    ++i;
  }

  if (!tasks.empty() && opts.probe_backend) backend.probe();

  const AgentConfig agent_cfg = cfg.agent_config();
  std::atomic<std::size_t> next{0};
  std::atomic<bool> cancel{false};
  std::mutex done_mutex;
  std::size_t done = 0;
  std::size_t written_now = 0;
  std::exception_ptr failure;

  const auto finish_problem = [&](ProblemState& st) {
    std::string body;
    for (const auto& t : st.traces) body += trace_to_json(t) + "\n";
    std::lock_guard lock(done_mutex);
    if (cancel.load()) return;
    write_file_atomic(trace_dir / (trace_file_stem(st.problem->id) + ".log"), body);
    ++done;
    ++written_now;
    if (opts.progress) opts.progress(st.problem->id, done, tasks.size() / static_cast<std::size_t>(cfg.samples_n));
    if (opts.stop_after_problems && written_now >= *opts.stop_after_problems) cancel = true;
  };

  const auto worker = [&] {
    for (;;) {
      if (cancel.load()) return;
      const std::size_t k = next.fetch_add(1);
      if (k >= tasks.size()) return;
      const Task task = tasks[k];
      ProblemState& st = states[task.problem];
      try {
        st.traces[static_cast<std::size_t>(task.agent)] =
            run_agent(task.agent, st.prompt, agent_cfg, backend, executor, &cancel);
        if (st.remaining.fetch_sub(1) == 1) finish_problem(st);
      } catch (...) {
        std::lock_guard lock(done_mutex);
        if (!failure) failure = std::current_exception();
        cancel = true;
        return;
      }
    }
  };

  const std::size_t threads = std::min(static_cast<std::size_t>(cfg.parallelism), tasks.size());
  if (threads > 0) {
    std::vector<std::jthread> pool_threads;
    for (std::size_t t = 1; t < threads; ++t) pool_threads.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
  if (cancel.load()) {
    throw RunInterrupted("run stopped after " + std::to_string(written_now) + " problem(s); rerun to resume");
  }

  for (const auto& st : states) {
    ProblemOutcome out;
    out.id = st.problem->id;
    out.gold = gold.find(st.problem->id)->second;
    if (!st.render_error.empty()) {
      out.error = st.render_error;
    } else {
      const ConsensusResult c = vote(st.problem->id, st.traces);
      out.elected = c.elected;
      out.tally = c.tally;
      out.valid_votes = c.valid_votes;
      out.total_agents = c.total_agents;
    }
    if (!out.elected && cfg.fallback_answer) {
      out.elected = cfg.fallback_answer;
      out.fallback_used = true;
    }
    out.correct = out.elected && out.elected == out.gold;
    report.correct_count += out.correct ? 1 : 0;
    report.per_problem.push_back(std::move(out));
  }
  report.total = static_cast<int>(report.per_problem.size());
  report.accuracy = report.total > 0 ? static_cast<double>(report.correct_count) / report.total : 0.0;
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  write_file_atomic(opts.out_dir / "reports" / (report.run_id + ".json"), serialize_report(report));
  return report;
}

}  // namespace tir
