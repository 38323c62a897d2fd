#include "synthetic.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include <json.hpp>

namespace synth {

namespace fs = std::filesystem;
using topictrend::Date;

Blobs gaussian_blobs(const std::vector<std::size_t>& sizes, std::size_t dim, double sigma, double box,
                     double min_gap, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-box, box);
  std::normal_distribution<double> g(0.0, sigma);
  std::vector<std::vector<double>> centres;
  while (centres.size() < sizes.size()) {
    std::vector<double> c(dim);
    for (auto& v : c) v = u(gen);
    bool ok = true;
    for (const auto& o : centres) {
      double d = 0;
      for (std::size_t j = 0; j < dim; ++j) d += (c[j] - o[j]) * (c[j] - o[j]);
      ok &= std::sqrt(d) >= min_gap;
    }
    if (ok) centres.push_back(c);
  }
  std::size_t n = 0;
  for (auto s : sizes) n += s;
  Blobs b{Matrix(n, dim), {}};
  std::size_t row = 0;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    for (std::size_t i = 0; i < sizes[c]; ++i, ++row) {
      for (std::size_t j = 0; j < dim; ++j) b.x(row, j) = centres[c][j] + g(gen);
      b.labels.push_back(static_cast<int>(c));
    }
  }
  return b;
}

Matrix uniform_box(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix x(n, dim);
  for (auto& v : x.data()) v = u(gen);
  return x;
}

std::vector<int> shuffled(std::vector<int> labels, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  for (std::size_t i = labels.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(labels[i - 1], labels[pick(gen)]);
  }
  return labels;
}

namespace {

const char* kKeywords[] = {"vaccine",  "ventilator", "transmission", "mortality", "pediatric",
                           "mask",     "anxiety",    "genome",       "serology",  "economy",
                           "tracing",  "lockdown",   "antiviral",    "telehealth", "biomarker"};

// Pronounceable pseudo-words, unique across the whole corpus.
std::vector<std::string> pseudo_words(std::size_t count, std::mt19937_64& gen, std::set<std::string>& used) {
  static const char* onset[] = {"b", "c", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "tr", "pl"};
  static const char* nucleus[] = {"a", "e", "i", "o", "u", "ai", "eo"};
  std::uniform_int_distribution<std::size_t> on(0, std::size(onset) - 1), nu(0, std::size(nucleus) - 1),
      len(3, 4);
  std::vector<std::string> out;
  while (out.size() < count) {
    std::string w;
    const auto syllables = len(gen);
    for (std::size_t s = 0; s < syllables; ++s) w += std::string(onset[on(gen)]) + nucleus[nu(gen)];
    if (used.insert(w).second) out.push_back(w);
  }
  return out;
}

// A few random Householder reflections so the latent subspace is not axis
// aligned in the full embedding.
void reflect(std::vector<double>& x, const std::vector<std::vector<double>>& normals) {
  for (const auto& v : normals) {
    double dot = 0;
    for (std::size_t j = 0; j < x.size(); ++j) dot += v[j] * x[j];
    for (std::size_t j = 0; j < x.size(); ++j) x[j] -= 2 * dot * v[j];
  }
}

}  // namespace

PlantedCorpus planted_corpus(const PlantedOptions& o) {
  constexpr std::size_t kLatent = 16;
  constexpr std::size_t kTopicWords = 14;
  std::mt19937_64 gen(o.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  PlantedCorpus c;
  std::set<std::string> used(std::begin(kKeywords), std::end(kKeywords));
  std::vector<std::vector<std::string>> vocab;
  for (std::size_t t = 0; t < o.topics; ++t) {
    c.keywords.push_back(kKeywords[t]);
    vocab.push_back(pseudo_words(kTopicWords, gen, used));
  }
  const auto background = pseudo_words(80, gen, used);
  static const char* filler[] = {"the", "of", "and", "in", "with", "for", "was", "were", "this", "that"};

  // Topic centres in the latent cube, pairwise at least 1 apart.
  std::vector<std::vector<double>> centres;
  while (centres.size() < o.topics) {
    std::vector<double> ctr(kLatent);
    for (auto& v : ctr) v = 2 * unit(gen) - 1;
    bool ok = true;
    for (const auto& other : centres) {
      double d = 0;
      for (std::size_t j = 0; j < kLatent; ++j) d += (ctr[j] - other[j]) * (ctr[j] - other[j]);
      ok &= d >= 1.0;
    }
    if (ok) centres.push_back(ctr);
  }
  std::vector<std::vector<double>> normals(3, std::vector<double>(o.dim));
  for (auto& v : normals) {
    double norm = 0;
    for (auto& x : v) norm += (x = normal(gen)) * x;
    for (auto& x : v) x /= std::sqrt(norm);
  }

  const int span = o.end.days_since_epoch() - o.start.days_since_epoch() + 1;
  std::uniform_int_distribution<int> day(0, span - 1);
  c.embeddings.vectors = Matrix(o.documents, o.dim);
  std::vector<double> emb(o.dim);
  for (std::size_t i = 0; i < o.documents; ++i) {
    const Date date = Date::from_days(o.start.days_since_epoch() + day(gen));
    const bool after = date.day >= o.step.day;
    // Cumulative draw: stepped topic, the others, then background.
    const double stepped = after ? o.stepped_after : o.stepped_before;
    double r = unit(gen);
    int topic = -1;
    for (std::size_t t = 0; t < o.topics; ++t) {
      const double share = static_cast<int>(t) == o.stepped_topic ? stepped : o.other_share;
      if (r < share) {
        topic = static_cast<int>(t);
        break;
      }
      r -= share;
    }

    char id[32];
    std::snprintf(id, sizeof id, "doc-%05zu", i);
    c.ids.push_back(id);
    c.dates.push_back(date);
    c.planted.push_back(topic);

    std::vector<std::string> words;
    auto pick = [&](const std::vector<std::string>& from) {
      return from[std::uniform_int_distribution<std::size_t>(0, from.size() - 1)(gen)];
    };
    for (int k = 0; k < 8; ++k) words.push_back(filler[std::uniform_int_distribution<std::size_t>(0, std::size(filler) - 1)(gen)]);
    std::string title;
    if (topic >= 0) {
      const auto t = static_cast<std::size_t>(topic);
      words.push_back(c.keywords[t]);
      words.push_back(c.keywords[t]);
      for (int k = 0; k < 18; ++k) words.push_back(pick(vocab[t]));
      for (int k = 0; k < 12; ++k) words.push_back(pick(background));
      title = "study of " + c.keywords[t] + " " + pick(vocab[t]);
    } else {
      for (int k = 0; k < 30; ++k) words.push_back(pick(background));
      for (int k = 0; k < 2; ++k) words.push_back(pick(vocab[std::uniform_int_distribution<std::size_t>(0, o.topics - 1)(gen)]));
      title = "report on " + pick(background);
    }
    std::shuffle(words.begin(), words.end(), gen);
    std::string abstract;
    for (const auto& w : words) abstract += (abstract.empty() ? "" : " ") + w;
    c.abstracts.push_back(abstract + ".");
    c.titles.push_back(title);

    for (std::size_t j = 0; j < o.dim; ++j) emb[j] = 0.003 * normal(gen);
    for (std::size_t j = 0; j < kLatent; ++j)
      emb[j] += topic >= 0 ? centres[static_cast<std::size_t>(topic)][j] + 0.02 * normal(gen) : 2.4 * unit(gen) - 1.2;
    reflect(emb, normals);
    std::copy(emb.begin(), emb.end(), c.embeddings.vectors.row(i).begin());
  }
  c.embeddings.ids = c.ids;
  return c;
}

fs::path write_planted(const fs::path& dir, const PlantedCorpus& c, const PlantedOptions& o,
                       const std::string& extra) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "corpus.jsonl", std::ios::binary);
    for (std::size_t i = 0; i < c.ids.size(); ++i) {
      nlohmann::json j = {{"record_id", c.ids[i]},
                          {"title", c.titles[i]},
                          {"abstract", c.abstracts[i]},
                          {"publish_date", c.dates[i].iso()},
                          {"language", "en"},
                          {"journal", "Synthetic Reports"}};
      out << j.dump() << '\n';
    }
  }
  topictrend::embedstore::save_binary(dir / "embeddings.bin", c.embeddings);
  const fs::path cfg = dir / "config.toml";
  std::ofstream out(cfg);
  out << "seed = 11\n\n"
      << "[corpus]\npath = \"corpus.jsonl\"\n\n"
      << "[embeddings]\npath = \"embeddings.bin\"\n\n"
      << "[filter]\nwindow = [\"" << o.start.iso() << "\", \"" << o.end.iso() << "\"]\n\n"
      << "[reduce]\nk = 16\n\n"
      << "[cluster]\nmin_cluster_size = 100\nmin_samples = 10\nselection = \"leaf\"\n\n"
      << "[represent]\nreduce_frequent_words = true\n"
      << extra;
  return cfg;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("topictrend-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace synth
