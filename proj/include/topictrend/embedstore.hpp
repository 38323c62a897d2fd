#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "topictrend/ingest.hpp"
#include "topictrend/matrix.hpp"

namespace topictrend::embedstore {

inline constexpr std::size_t kReferenceDim = 768;

struct EmbeddingMatrix {
  std::vector<std::string> ids;
  Matrix vectors;  // ids.size() x dim

  std::size_t size() const { return ids.size(); }
  std::size_t dim() const { return vectors.cols(); }
  // Set when dim() differs from the 768-dimensional reference contract.
  bool nonstandard_dim() const { return dim() != kReferenceDim; }
};

enum class Format { binary, csv, jsonl };

// Throws Error(dimension_mismatch | non_finite | duplicate_id | parse_error |
// io_error). Messages name the offending row.
EmbeddingMatrix load_embeddings(const std::filesystem::path& path, Format format);

// Binary layout: "EMB1", u32 n, u32 d (little-endian), n*d float32 LE
// row-major, then the n ids each followed by '\n'.
void save_binary(const std::filesystem::path& path, const EmbeddingMatrix& emb);
void save_csv(const std::filesystem::path& path, const EmbeddingMatrix& emb);
void save_jsonl(const std::filesystem::path& path, const EmbeddingMatrix& emb);

struct Aligned {
  ingest::CleanCorpus corpus;
  EmbeddingMatrix embeddings;
  std::size_t corpus_only = 0;
  std::size_t embedding_only = 0;
};

// Restricts both sides to the shared ids, in corpus order. Throws
// Error(empty_intersection) when nothing is shared.
Aligned align(const ingest::CleanCorpus& corpus, const EmbeddingMatrix& emb);

// ceil(fraction * n) distinct row indices drawn with Xoshiro256(seed) by a
// partial Fisher-Yates shuffle, returned ascending.
std::vector<std::size_t> subsample_indices(std::size_t n, double fraction, std::uint64_t seed);
EmbeddingMatrix subsample(const EmbeddingMatrix& emb, double fraction, std::uint64_t seed);

}  // namespace topictrend::embedstore
