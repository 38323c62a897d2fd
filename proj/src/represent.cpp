#include "topictrend/represent.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "topictrend/error.hpp"
#include "topictrend/text.hpp"

namespace topictrend::represent {

std::vector<std::string> tokenize(std::string_view text) {
  auto tokens = text::word_tokens(text);
  std::erase_if(tokens, [](const std::string& t) { return t.size() < 2 || text::is_stopword(t); });
  return tokens;
}

std::optional<std::uint32_t> Vocabulary::index_of(std::string_view term) const {
  auto it = std::lower_bound(terms.begin(), terms.end(), term);
  if (it == terms.end() || *it != term) return std::nullopt;
  return static_cast<std::uint32_t>(it - terms.begin());
}

ClassCounts counts_from_maps(const std::vector<std::map<std::string, std::int64_t>>& classes) {
  std::map<std::string, std::int64_t> totals;
  for (const auto& cls : classes) {
    for (const auto& [term, count] : cls) {
      if (count < 0) throw Error(Errc::invalid_argument, "negative count for term '" + term + "'");
      if (count > 0) totals[term] += count;
    }
  }
  ClassCounts out;
  out.vocabulary.stopword_list_id = std::string(text::kStopwordListId);
  for (const auto& [term, f] : totals) {
    out.vocabulary.terms.push_back(term);
    out.vocabulary.frequency.push_back(f);
  }
  for (const auto& cls : classes) {
    std::vector<TermCount> row;
    for (const auto& [term, count] : cls) {
      if (count > 0) row.push_back({*out.vocabulary.index_of(term), count});
    }
    out.rows.push_back(std::move(row));  // map order is term order
  }
  return out;
}

ClassCounts build_class_counts(std::span<const std::string> documents, std::span<const int> labels) {
  if (documents.size() != labels.size())
    throw Error(Errc::dimension_mismatch, "documents and labels differ in length");
  int classes = 0;
  for (int l : labels) classes = std::max(classes, l + 1);
  if (classes == 0) throw Error(Errc::no_classes, "no document belongs to a topic");

  const auto n = static_cast<std::ptrdiff_t>(documents.size());
  std::vector<std::vector<std::string>> tokens(documents.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (labels[k] >= 0) tokens[k] = tokenize(documents[k]);
  }

  std::vector<std::map<std::string, std::int64_t>> per_class(static_cast<std::size_t>(classes));
  for (std::size_t i = 0; i < documents.size(); ++i) {
    if (labels[i] < 0) continue;
    auto& cls = per_class[static_cast<std::size_t>(labels[i])];
    for (auto& t : tokens[i]) ++cls[std::move(t)];
  }
  return counts_from_maps(per_class);
}

void ClassTfIdfModel::refresh_norms() {
  norms.assign(weights.size(), 0.0);
  for (std::size_t c = 0; c < weights.size(); ++c) {
    double s = 0.0;
    for (const auto& w : weights[c]) s += w.weight * w.weight;
    norms[c] = std::sqrt(s);
  }
}

ClassTfIdfModel class_tfidf(const ClassCounts& counts, bool reduce_frequent_words) {
  if (counts.class_count() == 0) throw Error(Errc::no_classes, "no classes to weight");
  std::vector<double> totals;
  for (std::size_t c = 0; c < counts.class_count(); ++c) {
    std::int64_t total = 0;
    for (const auto& tc : counts.rows[c]) total += tc.count;
    if (total == 0) throw Error(Errc::empty_class, "class " + std::to_string(c) + " has no tokens");
    totals.push_back(static_cast<double>(total));
  }
  double sum = 0.0;
  for (double t : totals) sum += t;

  ClassTfIdfModel model;
  model.vocabulary = counts.vocabulary;
  model.reduce_frequent_words = reduce_frequent_words;
  model.average_class_tokens = sum / static_cast<double>(totals.size());
  const double a = model.average_class_tokens;
  for (std::size_t c = 0; c < counts.class_count(); ++c) {
    std::vector<TermWeight> row;
    row.reserve(counts.rows[c].size());
    for (const auto& tc : counts.rows[c]) {
      double tf = static_cast<double>(tc.count) / totals[c];
      if (reduce_frequent_words) tf = std::sqrt(tf);
      const auto f = static_cast<double>(counts.vocabulary.frequency[tc.term]);
      row.push_back({tc.term, tf * std::log(1.0 + a / f)});
    }
    model.weights.push_back(std::move(row));
  }
  model.refresh_norms();
  return model;
}

std::vector<TermScore> top_terms(const ClassTfIdfModel& model, int topic_id, std::size_t n) {
  if (topic_id < 0 || static_cast<std::size_t>(topic_id) >= model.class_count())
    throw Error(Errc::topic_not_found, "topic " + std::to_string(topic_id) + " does not exist");
  std::vector<TermWeight> row = model.weights[static_cast<std::size_t>(topic_id)];
  std::erase_if(row, [](const TermWeight& w) { return !(w.weight > 0.0); });
  auto better = [](const TermWeight& a, const TermWeight& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.term < b.term;
  };
  const std::size_t keep = std::min(n, row.size());
  std::partial_sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(keep), row.end(), better);
  std::vector<TermScore> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back({model.vocabulary.terms[row[i].term], row[i].weight});
  return out;
}

namespace {

void rank_hits(std::vector<TopicHit>& hits, std::size_t n) {
  std::sort(hits.begin(), hits.end(), [](const TopicHit& a, const TopicHit& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.topic_id < b.topic_id;
  });
  if (hits.size() > n) hits.resize(n);
}

}  // namespace

SearchResult search_topics(const ClassTfIdfModel& model, std::string_view query, std::size_t n) {
  if (n == 0) throw Error(Errc::invalid_argument, "result count must be positive");
  const auto tokens = tokenize(query);
  if (tokens.empty()) throw Error(Errc::no_searchable_terms, "no searchable terms in query");

  SearchResult res;
  std::map<std::uint32_t, double> q;
  for (const auto& t : tokens) {
    if (auto idx = model.vocabulary.index_of(t)) {
      q[*idx] += 1.0;
    } else if (std::find(res.unknown.begin(), res.unknown.end(), t) == res.unknown.end()) {
      res.unknown.push_back(t);
    }
  }
  if (q.empty()) {
    res.status = SearchStatus::no_match;
    return res;
  }
  double qnorm = 0.0;
  for (const auto& [term, v] : q) qnorm += v * v;
  qnorm = std::sqrt(qnorm);

  for (std::size_t c = 0; c < model.class_count(); ++c) {
    if (!(model.norms[c] > 0.0)) continue;
    const auto& row = model.weights[c];
    double dot = 0.0;
    for (const auto& [term, v] : q) {
      auto it = std::lower_bound(row.begin(), row.end(), term,
                                 [](const TermWeight& w, std::uint32_t t) { return w.term < t; });
      if (it != row.end() && it->term == term) dot += v * it->weight;
    }
    if (dot <= 0.0) continue;
    const double sim = std::clamp(dot / (qnorm * model.norms[c]), 0.0, 1.0);
    res.hits.push_back({static_cast<int>(c), sim});
  }
  rank_hits(res.hits, n);
  return res;
}

std::vector<TopicHit> search_by_embedding(const Matrix& centroids, std::span<const double> query,
                                          std::size_t n) {
  if (n == 0) throw Error(Errc::invalid_argument, "result count must be positive");
  if (query.size() != centroids.cols())
    throw Error(Errc::dimension_mismatch, "query has " + std::to_string(query.size()) +
                                              " dimensions, topics have " + std::to_string(centroids.cols()));
  double qn = 0.0;
  for (double v : query) qn += v * v;
  qn = std::sqrt(qn);
  std::vector<TopicHit> hits;
  if (!(qn > 0.0)) return hits;
  for (std::size_t c = 0; c < centroids.rows(); ++c) {
    const auto row = centroids.row(c);
    double dot = 0.0, cn = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      dot += row[j] * query[j];
      cn += row[j] * row[j];
    }
    if (!(cn > 0.0)) continue;
    hits.push_back({static_cast<int>(c), std::clamp(dot / (qn * std::sqrt(cn)), -1.0, 1.0)});
  }
  rank_hits(hits, n);
  return hits;
}

}  // namespace topictrend::represent
