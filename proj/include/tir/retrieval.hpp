#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tir/corpus.hpp"

namespace tir {

/// Normalized keywords, kept sorted so scoring sums in a fixed order.
using KeywordSet = std::set<std::string>;

/// NFC, lowercase, trimmed.
std::string normalize_keyword(std::string_view keyword);

/// Manual keywords win when present (normalized, empties dropped). Otherwise:
/// word tokens of at least 3 code points that are not in the shipped
/// Bangla/English stopword lists.
KeywordSet extract_keywords(std::string_view text, std::span<const std::string> manual);

/// Keywords for a corpus entry: its manual list, else tokens of both statements.
KeywordSet problem_keywords(const Problem& problem);

bool is_stopword(std::string_view normalized_word);

enum class Similarity { idf, jaccard };

/// Inverted keyword index over a corpus. Immutable after construction.
class KeywordIndex {
 public:
  KeywordIndex() = default;
  explicit KeywordIndex(const Corpus& corpus);

  std::size_t doc_count() const noexcept { return doc_keywords_.size(); }
  const std::map<std::string, std::set<std::string>>& postings() const noexcept { return postings_; }
  const std::map<std::string, KeywordSet>& doc_keywords() const noexcept { return doc_keywords_; }
  std::size_t document_frequency(const std::string& keyword) const;

  /// ln(1 + N / df); 0 for keywords absent from the index.
  double idf(const std::string& keyword) const;

 private:
  std::map<std::string, std::set<std::string>> postings_;
  std::map<std::string, KeywordSet> doc_keywords_;
};

KeywordIndex build_index(const Corpus& corpus);

struct ScoredId {
  std::string id;
  double score = 0.0;

  bool operator==(const ScoredId&) const = default;
};

/// Score of one candidate against the query keywords. IDF: sum of idf over
/// shared keywords. Jaccard: |shared| / |union|.
double similarity_score(const KeywordIndex& index, const KeywordSet& query, const KeywordSet& candidate,
                        Similarity metric);

/// Up to k best candidates, excluding the query's own id and zero scores;
/// sorted by non-increasing score, ties by ascending id.
std::vector<ScoredId> similar(const KeywordIndex& index, const Problem& query, int k,
                              Similarity metric = Similarity::idf);
std::vector<ScoredId> similar(const KeywordIndex& index, std::string_view query_id, const KeywordSet& query, int k,
                              Similarity metric = Similarity::idf);

struct Exemplar {
  Problem problem;
  std::string solution_text;
};

using SolutionMap = std::map<std::string, std::string, std::less<>>;

/// Non-empty `solution_tir` fields of a corpus, keyed by id.
SolutionMap solutions_of(const Corpus& corpus);

/// Keeps rank order; ids without a solution (or missing from the corpus) are skipped.
std::vector<Exemplar> to_exemplars(std::span<const ScoredId> ranked, const Corpus& corpus,
                                   const SolutionMap& solutions);

}  // namespace tir
