#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "topictrend/matrix.hpp"

namespace topictrend::represent {

// Word tokens with English stopwords and single-character tokens removed.
std::vector<std::string> tokenize(std::string_view text);

// Terms in lexicographic order, so term indices also order terms.
struct Vocabulary {
  std::vector<std::string> terms;
  std::vector<std::int64_t> frequency;  // f_t: total count over all classes
  std::string stopword_list_id;

  std::size_t size() const { return terms.size(); }
  std::optional<std::uint32_t> index_of(std::string_view term) const;
  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;
};

struct TermCount {
  std::uint32_t term = 0;
  std::int64_t count = 0;
  friend bool operator==(const TermCount&, const TermCount&) = default;
};

// rows[c] lists the non-zero term counts of class c, by ascending term index.
struct ClassCounts {
  Vocabulary vocabulary;
  std::vector<std::vector<TermCount>> rows;

  std::size_t class_count() const { return rows.size(); }
};

// Classes are the labels 0..max(label); outlier documents (label < 0) are
// left out. Throws Error(no_classes) when no document has a class.
ClassCounts build_class_counts(std::span<const std::string> documents, std::span<const int> labels);

// Counts given directly as term -> count per class.
ClassCounts counts_from_maps(const std::vector<std::map<std::string, std::int64_t>>& classes);

struct TermWeight {
  std::uint32_t term = 0;
  double weight = 0.0;
  friend bool operator==(const TermWeight&, const TermWeight&) = default;
};

struct ClassTfIdfModel {
  Vocabulary vocabulary;
  double average_class_tokens = 0.0;  // A
  bool reduce_frequent_words = true;
  std::vector<std::vector<TermWeight>> weights;  // per class, ascending term index
  std::vector<double> norms;                     // Euclidean norm of each weight row

  std::size_t class_count() const { return weights.size(); }
  void refresh_norms();
};

// W(t, c) = tf(t, c) * ln(1 + A / f_t) with tf = count / class total, square
// rooted when reduce_frequent_words is set. Throws Error(empty_class).
ClassTfIdfModel class_tfidf(const ClassCounts& counts, bool reduce_frequent_words);

struct TermScore {
  std::string term;
  double weight = 0.0;
  friend bool operator==(const TermScore&, const TermScore&) = default;
};

// Highest weights first, ties in lexicographic term order. Throws
// Error(topic_not_found).
std::vector<TermScore> top_terms(const ClassTfIdfModel& model, int topic_id, std::size_t n = 30);

struct TopicHit {
  int topic_id = 0;
  double similarity = 0.0;
  friend bool operator==(const TopicHit&, const TopicHit&) = default;
};

enum class SearchStatus { ok, no_match };

struct SearchResult {
  SearchStatus status = SearchStatus::ok;
  std::vector<TopicHit> hits;        // best first, ties by topic id
  std::vector<std::string> unknown;  // query tokens outside the vocabulary
};

// Cosine between the query's term counts and each topic's weight vector.
// Topics with zero similarity are not returned. A query whose tokens are all
// out of vocabulary gives status no_match. Throws Error(no_searchable_terms)
// when the query has no tokens left after tokenization.
SearchResult search_topics(const ClassTfIdfModel& model, std::string_view query, std::size_t n = 6);

// Cosine between a caller-supplied embedding and per-topic centroids (rows).
// Throws Error(dimension_mismatch).
std::vector<TopicHit> search_by_embedding(const Matrix& centroids, std::span<const double> query,
                                          std::size_t n = 6);

}  // namespace topictrend::represent
