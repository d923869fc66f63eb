#include "tir/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "unicode.hpp"

namespace tir {

namespace embedded {
extern const std::string_view kStopwordsEn;
extern const std::string_view kStopwordsBn;
}  // namespace embedded

namespace {

constexpr std::size_t kMinKeywordLength = 3;

std::unordered_set<std::string> load_stopwords() {
  std::unordered_set<std::string> words;
  for (std::string_view list : {embedded::kStopwordsEn, embedded::kStopwordsBn}) {
    std::istringstream in{std::string(list)};
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line.front() == '#') continue;
      std::string word = unicode::normalize(line);
      if (!word.empty()) words.insert(std::move(word));
    }
  }
  return words;
}

}  // namespace

std::string normalize_keyword(std::string_view keyword) { return unicode::normalize(keyword); }

bool is_stopword(std::string_view normalized_word) {
  static const std::unordered_set<std::string> kStopwords = load_stopwords();
  return kStopwords.contains(std::string(normalized_word));
}

KeywordSet extract_keywords(std::string_view text, std::span<const std::string> manual) {
  KeywordSet out;
  if (!manual.empty()) {
    for (const auto& kw : manual) {
      std::string n = normalize_keyword(kw);
      if (!n.empty()) out.insert(std::move(n));
    }
    return out;
  }
  for (auto& word : unicode::words(text)) {
    if (unicode::codepoint_count(word) < kMinKeywordLength || is_stopword(word)) continue;
    out.insert(std::move(word));
  }
  return out;
}

KeywordSet problem_keywords(const Problem& problem) {
  std::string text = problem.statement_bn;
  if (problem.statement_en) {
    text += '\n';
    text += *problem.statement_en;
  }
  return extract_keywords(text, problem.keywords);
}

KeywordIndex::KeywordIndex(const Corpus& corpus) {
  for (const auto& p : corpus) {
    KeywordSet kws = problem_keywords(p);
    for (const auto& kw : kws) postings_[kw].insert(p.id);
    doc_keywords_.emplace(p.id, std::move(kws));
  }
}

std::size_t KeywordIndex::document_frequency(const std::string& keyword) const {
  const auto it = postings_.find(keyword);
  return it == postings_.end() ? 0 : it->second.size();
}

double KeywordIndex::idf(const std::string& keyword) const {
  const std::size_t df = document_frequency(keyword);
  if (df == 0) return 0.0;
  return std::log(1.0 + static_cast<double>(doc_count()) / static_cast<double>(df));
}

KeywordIndex build_index(const Corpus& corpus) { return KeywordIndex(corpus); }

double similarity_score(const KeywordIndex& index, const KeywordSet& query, const KeywordSet& candidate,
                        Similarity metric) {
  std::size_t shared = 0;
  double idf_sum = 0.0;
  for (const auto& kw : query) {
    if (!candidate.contains(kw)) continue;
    ++shared;
    idf_sum += index.idf(kw);
  }
  if (metric == Similarity::idf) return idf_sum;
  const std::size_t uni = query.size() + candidate.size() - shared;
  return uni == 0 ? 0.0 : static_cast<double>(shared) / static_cast<double>(uni);
}

std::vector<ScoredId> similar(const KeywordIndex& index, std::string_view query_id, const KeywordSet& query, int k,
                              Similarity metric) {
  std::vector<ScoredId> scored;
  if (k < 1 || query.empty()) return scored;

  // Only documents sharing at least one keyword can score above zero.
  std::set<std::string_view> candidates;
  for (const auto& kw : query) {
    const auto it = index.postings().find(kw);
    if (it == index.postings().end()) continue;
    for (const auto& id : it->second) {
      if (id != query_id) candidates.insert(id);
    }
  }
  for (std::string_view id : candidates) {
    const auto& doc = index.doc_keywords().find(std::string(id))->second;
    const double score = similarity_score(index, query, doc, metric);
    if (score > 0.0) scored.push_back({std::string(id), score});
  }

  const auto by_rank = [](const ScoredId& a, const ScoredId& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  };
  const std::size_t keep = std::min(scored.size(), static_cast<std::size_t>(k));
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), by_rank);
  scored.resize(keep);
  return scored;
}

std::vector<ScoredId> similar(const KeywordIndex& index, const Problem& query, int k, Similarity metric) {
  return similar(index, query.id, problem_keywords(query), k, metric);
}

SolutionMap solutions_of(const Corpus& corpus) {
  SolutionMap out;
  for (const auto& p : corpus) {
    if (p.solution_tir && !p.solution_tir->empty()) out.emplace(p.id, *p.solution_tir);
  }
  return out;
}

std::vector<Exemplar> to_exemplars(std::span<const ScoredId> ranked, const Corpus& corpus,
                                   const SolutionMap& solutions) {
  std::vector<Exemplar> out;
  for (const auto& entry : ranked) {
    const auto sol = solutions.find(entry.id);
    if (sol == solutions.end() || sol->second.empty()) continue;
    const Problem* p = corpus.find(entry.id);
    if (p == nullptr) continue;
    out.push_back({*p, sol->second});
  }
  return out;
}

}  // namespace tir
