#pragma once

// Seeded synthetic data for tests: Gaussian blobs, uniform noise and a
// planted-topic corpus with matching embeddings.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "topictrend/date.hpp"
#include "topictrend/embedstore.hpp"
#include "topictrend/matrix.hpp"

namespace synth {

using topictrend::Matrix;

struct Blobs {
  Matrix x;
  std::vector<int> labels;
};

// Isotropic Gaussian blobs with centres drawn in [-box, box]^dim and kept at
// least `min_gap` apart.
Blobs gaussian_blobs(const std::vector<std::size_t>& sizes, std::size_t dim, double sigma, double box,
                     double min_gap, std::uint64_t seed);

Matrix uniform_box(std::size_t n, std::size_t dim, std::uint64_t seed);

// Fisher-Yates shuffle of the labels with std::mt19937_64.
std::vector<int> shuffled(std::vector<int> labels, std::uint64_t seed);

struct PlantedOptions {
  std::size_t documents = 5000;
  std::size_t topics = 10;
  std::size_t dim = 768;
  std::uint64_t seed = 7;
  topictrend::Date start = topictrend::Date::from_ymd(2020, 1, 1);
  topictrend::Date end = topictrend::Date::from_ymd(2022, 6, 30);
  topictrend::Date step = topictrend::Date::from_ymd(2021, 4, 1);  // month 15
  int stepped_topic = 0;
  double stepped_before = 0.03;
  double stepped_after = 0.12;
  double other_share = 0.08;  // every other topic, both periods
};

struct PlantedCorpus {
  std::vector<std::string> ids;
  std::vector<topictrend::Date> dates;
  std::vector<std::string> abstracts;
  std::vector<std::string> titles;
  std::vector<int> planted;  // -1 for background documents
  std::vector<std::string> keywords;  // one per topic
  topictrend::embedstore::EmbeddingMatrix embeddings;
};

PlantedCorpus planted_corpus(const PlantedOptions& options);

// Writes corpus.jsonl, embeddings.bin and config.toml into dir and returns
// the config path. `extra` is appended to the config verbatim.
std::filesystem::path write_planted(const std::filesystem::path& dir, const PlantedCorpus& corpus,
                                    const PlantedOptions& options, const std::string& extra = "");

// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace synth
