// Brute-force reference implementations and fixture helpers shared by the
// unit tests and the acceptance binary.
#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tir/answer.hpp"
#include "tir/corpus.hpp"
#include "tir/retrieval.hpp"

namespace oracle {

inline std::filesystem::path fixtures() { return TIR_FIXTURES; }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  static std::mt19937_64 rng{std::random_device{}()};
  auto dir = std::filesystem::temp_directory_path() / ("tir-" + tag + "-" + std::to_string(rng()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

struct VoteOutcome {
  std::optional<tir::Answer> elected;
  int top_count = 0;
  std::map<tir::Answer, int> tally;
};

/// Count everything, find the maximum, then walk the ballots in order and take
/// the first answer that reaches it.
inline VoteOutcome brute_vote(const std::vector<std::optional<tir::Answer>>& ballots) {
  VoteOutcome out;
  for (const auto& b : ballots) {
    if (b) ++out.tally[*b];
  }
  for (const auto& [a, c] : out.tally) out.top_count = std::max(out.top_count, c);
  for (const auto& b : ballots) {
    if (b && out.tally[*b] == out.top_count) {
      out.elected = b;
      break;
    }
  }
  return out;
}

struct Ranked {
  std::string id;
  double score;
};

/// Exhaustive scoring straight from the definitions: idf = ln(1 + N/df) with
/// df counted by scanning every document; score = sum over shared keywords
/// (Jaccard: |shared| / |union|). Sort by score desc, id asc; drop zeros.
inline std::vector<Ranked> brute_similar(const std::map<std::string, tir::KeywordSet>& docs,
                                         const std::string& query_id, const tir::KeywordSet& query, int k,
                                         tir::Similarity metric) {
  const double n = static_cast<double>(docs.size());
  std::vector<Ranked> all;
  for (const auto& [id, kws] : docs) {
    if (id == query_id) continue;
    double s = 0.0;
    std::size_t shared = 0;
    for (const auto& kw : query) {
      if (!kws.count(kw)) continue;
      ++shared;
      std::size_t df = 0;
      for (const auto& [other, okws] : docs) df += okws.count(kw);
      s += std::log(1.0 + n / static_cast<double>(df));
    }
    if (metric == tir::Similarity::jaccard) {
      std::set<std::string> uni(query.begin(), query.end());
      uni.insert(kws.begin(), kws.end());
      s = uni.empty() ? 0.0 : static_cast<double>(shared) / static_cast<double>(uni.size());
    }
    if (s > 0.0) all.push_back({id, s});
  }
  std::stable_sort(all.begin(), all.end(), [](const Ranked& a, const Ranked& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  if (all.size() > static_cast<std::size_t>(k)) all.resize(static_cast<std::size_t>(k));
  return all;
}

/// Random corpus of up to `max_docs` problems, each with up to `max_keywords`
/// manual keywords drawn from a small shared vocabulary so overlaps are common.
inline tir::Corpus random_corpus(std::mt19937_64& rng, int max_docs, int max_keywords) {
  static const std::vector<std::string> vocab = {
      "prime",  "digit",   "square",   "triangle", "circle", "remainder", "divisor", "sum",
      "count",  "ways",    "area",     "angle",    "modulo", "factor",    "graph",   "sequence",
      "ভাগশেষ", "বর্গ",     "ত্রিভুজ",   "সংখ্যা",     "উৎপাদক", "বৃত্ত",       "যোগফল",   "কোণ"};
  std::uniform_int_distribution<int> docs_d(1, max_docs);
  std::uniform_int_distribution<int> kw_d(0, max_keywords);
  std::uniform_int_distribution<std::size_t> word_d(0, vocab.size() - 1);
  const int n = docs_d(rng);
  std::vector<tir::Problem> problems;
  for (int i = 0; i < n; ++i) {
    tir::Problem p;
    char id[16];
    std::snprintf(id, sizeof id, "R%03d", i);
    p.id = id;
    p.statement_bn = "statement " + p.id;
    const int m = kw_d(rng);
    for (int j = 0; j < m; ++j) p.keywords.push_back(vocab[word_d(rng)]);
    if (p.keywords.empty()) p.keywords.push_back("");  // manual list present but empty after normalization
    problems.push_back(std::move(p));
  }
  std::shuffle(problems.begin(), problems.end(), rng);
  return tir::Corpus("random", std::move(problems));
}

}  // namespace oracle
