#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "topictrend/cluster.hpp"
#include "topictrend/config.hpp"
#include "topictrend/embedstore.hpp"
#include "topictrend/fetch.hpp"
#include "topictrend/ingest.hpp"
#include "topictrend/model.hpp"
#include "topictrend/tune.hpp"

// Stage drivers behind the CLI. Each reads what it needs from the run config
// and returns values; writing files is left to the caller.
namespace topictrend::pipeline {

ingest::Schema schema_from(const config::Config& cfg);
ingest::FilterOptions filter_options_from(const config::Config& cfg);
ingest::InputFormat corpus_format_from(const config::Config& cfg, const std::filesystem::path& path);
embedstore::Format embedding_format_from(const config::Config& cfg, const std::filesystem::path& path);
tune::Grid grid_from(const config::Config& cfg);
tune::TuneOptions tune_options_from(const config::Config& cfg);
ingest::FetchConfig fetch_config_from(const config::Config& cfg);
std::uint64_t seed_from(const config::Config& cfg);

struct Prepared {
  ingest::CleanCorpus corpus;
  ingest::CorpusProfile profile;  // of the raw parsed records
  std::vector<ingest::RowError> skipped;
};

Prepared prepare(const config::Config& cfg);
Prepared prepare_records(const config::Config& cfg, ingest::ParseResult parsed);

embedstore::EmbeddingMatrix load_embeddings(const config::Config& cfg, const std::filesystem::path& path);

struct FitOptions {
  std::size_t k = 50;
  cluster::DensityParams params;
  bool reduce_frequent_words = true;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::filesystem::path cases;
  std::filesystem::path events;
};

FitOptions fit_options_from(const config::Config& cfg);

// Overrides k and the density parameters with a tune stage's best.json.
void apply_best(FitOptions& options, const nlohmann::json& best);
nlohmann::json best_json(const tune::TuneResult& result);

// align -> PCA -> density clustering -> c-TF-IDF -> series for 1-4 week
// bins, on the full corpus. The model comes back quantized.
TopicModel fit(const ingest::CleanCorpus& corpus, const embedstore::EmbeddingMatrix& embeddings,
               const FitOptions& options);

struct ExploreOptions {
  int k_min = 2;
  int k_max = 60;
  std::uint64_t seed = 0;
  int restarts = 10;  // k-means runs per k, lowest inertia kept
  std::size_t top_n = 30;
  std::size_t scatter_points = 2000;
  std::size_t components = 50;  // PCA before k-means; 0 clusters the raw vectors
};

// k-means feasibility pass: silhouette per k, the chosen k, per-cluster
// terms and a 2-D principal component scatter.
nlohmann::json explore(const ingest::CleanCorpus& corpus, const embedstore::EmbeddingMatrix& embeddings,
                       const ExploreOptions& options);

}  // namespace topictrend::pipeline
