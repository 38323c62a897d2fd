#include "topictrend/embedstore.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "topictrend/csv.hpp"
#include "topictrend/error.hpp"
#include "topictrend/rng.hpp"

namespace topictrend::embedstore {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

namespace {

void check_row(const std::vector<double>& values, std::size_t row, std::size_t expected_dim) {
  if (values.size() != expected_dim)
    throw Error(Errc::dimension_mismatch, "row " + std::to_string(row) + " has " +
                                              std::to_string(values.size()) + " values, expected " +
                                              std::to_string(expected_dim));
  for (std::size_t c = 0; c < values.size(); ++c) {
    if (!std::isfinite(values[c]))
      throw Error(Errc::non_finite, "row " + std::to_string(row) + " has a non-finite value at column " +
                                        std::to_string(c));
  }
}

void check_unique(const std::vector<std::string>& ids) {
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!seen.insert(ids[i]).second)
      throw Error(Errc::duplicate_id, "duplicate id '" + ids[i] + "' at row " + std::to_string(i));
  }
}

std::uint32_t read_u32(const char* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return v;
}

EmbeddingMatrix load_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || bytes.compare(0, 4, "EMB1") != 0)
    throw Error(Errc::parse_error, path.string() + ": missing EMB1 magic");
  const std::size_t n = read_u32(bytes.data() + 4);
  const std::size_t d = read_u32(bytes.data() + 8);
  const std::size_t payload = n * d * 4;
  if (bytes.size() < 12 + payload)
    throw Error(Errc::parse_error, path.string() + ": truncated vector block (need " +
                                       std::to_string(12 + payload) + " bytes, have " +
                                       std::to_string(bytes.size()) + ")");
  EmbeddingMatrix emb;
  emb.vectors = Matrix(n, d);
  const char* p = bytes.data() + 12;
  for (std::size_t i = 0; i < n * d; ++i) {
    float f;
    std::memcpy(&f, p + 4 * i, 4);
    if (!std::isfinite(f))
      throw Error(Errc::non_finite, "row " + std::to_string(i / d) + " has a non-finite value at column " +
                                        std::to_string(i % d));
    emb.vectors.data()[i] = f;
  }
  std::string_view tail(bytes.data() + 12 + payload, bytes.size() - 12 - payload);
  while (!tail.empty() && emb.ids.size() < n) {
    auto nl = tail.find('\n');
    emb.ids.emplace_back(tail.substr(0, nl));
    tail = nl == std::string_view::npos ? std::string_view() : tail.substr(nl + 1);
  }
  if (emb.ids.size() != n || !tail.empty())
    throw Error(Errc::parse_error, path.string() + ": expected " + std::to_string(n) +
                                       " ids after the vector block");
  check_unique(emb.ids);
  return emb;
}

double parse_number(const std::string& s, std::size_t row) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::parse_error, "row " + std::to_string(row) + ": bad number '" + s + "'");
  }
}

EmbeddingMatrix load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  auto rows = read_csv(in);
  if (rows.empty() || rows[0].cells.empty() || rows[0].cells[0] != "id")
    throw Error(Errc::parse_error, path.string() + ": header must start with 'id'");
  const std::size_t d = rows[0].cells.size() - 1;
  EmbeddingMatrix emb;
  std::vector<double> data;
  data.reserve((rows.size() - 1) * d);
  std::vector<double> values;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& cells = rows[r].cells;
    values.clear();
    for (std::size_t c = 1; c < cells.size(); ++c) values.push_back(parse_number(cells[c], r - 1));
    if (values.size() != d)
      throw Error(Errc::dimension_mismatch, "row " + std::to_string(r - 1) + " (line " +
                                                std::to_string(rows[r].line) + ") has " +
                                                std::to_string(values.size()) + " values, header declares " +
                                                std::to_string(d));
    check_row(values, r - 1, d);
    emb.ids.push_back(cells[0]);
    data.insert(data.end(), values.begin(), values.end());
  }
  emb.vectors = Matrix(emb.ids.size(), d, std::move(data));
  check_unique(emb.ids);
  return emb;
}

EmbeddingMatrix load_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  EmbeddingMatrix emb;
  std::vector<double> data;
  std::size_t d = 0;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j.contains("vector") ||
        !j["vector"].is_array())
      throw Error(Errc::parse_error, "row " + std::to_string(row) + ": expected {\"id\", \"vector\"}");
    std::vector<double> values;
    for (const auto& v : j["vector"]) {
      if (!v.is_number())
        throw Error(Errc::non_finite, "row " + std::to_string(row) + " has a non-numeric entry");
      values.push_back(v.get<double>());
    }
    if (row == 0) d = values.size();
    check_row(values, row, d);
    emb.ids.push_back(j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump());
    data.insert(data.end(), values.begin(), values.end());
    ++row;
  }
  emb.vectors = Matrix(emb.ids.size(), d, std::move(data));
  check_unique(emb.ids);
  return emb;
}

}  // namespace

EmbeddingMatrix load_embeddings(const std::filesystem::path& path, Format format) {
  switch (format) {
    case Format::binary: return load_binary(path);
    case Format::csv: return load_csv(path);
    case Format::jsonl: return load_jsonl(path);
  }
  throw Error(Errc::invalid_argument, "unknown embedding format");
}

void save_binary(const std::filesystem::path& path, const EmbeddingMatrix& emb) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  const auto n = static_cast<std::uint32_t>(emb.size());
  const auto d = static_cast<std::uint32_t>(emb.dim());
  out.write("EMB1", 4);
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&d), 4);
  std::vector<float> buf(emb.vectors.data().begin(), emb.vectors.data().end());
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 4));
  for (const auto& id : emb.ids) out << id << '\n';
  if (!out) throw Error(Errc::io_error, "failed writing " + path.string());
}

void save_csv(const std::filesystem::path& path, const EmbeddingMatrix& emb) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out << "id";
  for (std::size_t c = 0; c < emb.dim(); ++c) out << ",v" << c;
  out << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < emb.size(); ++i) {
    out << csv_escape(emb.ids[i]);
    for (double v : emb.vectors.row(i)) out << ',' << v;
    out << '\n';
  }
}

void save_jsonl(const std::filesystem::path& path, const EmbeddingMatrix& emb) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  for (std::size_t i = 0; i < emb.size(); ++i) {
    auto row = emb.vectors.row(i);
    nlohmann::json j = {{"id", emb.ids[i]}, {"vector", std::vector<double>(row.begin(), row.end())}};
    out << j.dump() << '\n';
  }
}

Aligned align(const ingest::CleanCorpus& corpus, const EmbeddingMatrix& emb) {
  std::unordered_map<std::string_view, std::size_t> row_of;
  for (std::size_t i = 0; i < emb.ids.size(); ++i) row_of.emplace(emb.ids[i], i);

  Aligned out;
  out.corpus.window = corpus.window;
  out.corpus.provenance = corpus.provenance;
  std::vector<std::size_t> rows;
  for (const auto& rec : corpus.records) {
    auto it = row_of.find(rec.record_id);
    if (it == row_of.end()) {
      ++out.corpus_only;
      continue;
    }
    out.corpus.records.push_back(rec);
    rows.push_back(it->second);
  }
  if (rows.empty())
    throw Error(Errc::empty_intersection, "corpus and embeddings share no record ids");
  out.embedding_only = emb.size() - rows.size();
  out.embeddings.vectors = emb.vectors.select_rows(rows);
  for (auto r : rows) out.embeddings.ids.push_back(emb.ids[r]);
  return out;
}

std::vector<std::size_t> subsample_indices(std::size_t n, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw Error(Errc::invalid_argument, "subsample fraction must be in (0, 1]");
  const auto m = std::min(n, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n))));
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  if (m == n) return idx;
  Xoshiro256 rng(seed);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  return idx;
}

EmbeddingMatrix subsample(const EmbeddingMatrix& emb, double fraction, std::uint64_t seed) {
  const auto idx = subsample_indices(emb.size(), fraction, seed);
  EmbeddingMatrix out;
  out.vectors = emb.vectors.select_rows(idx);
  for (auto i : idx) out.ids.push_back(emb.ids[i]);
  return out;
}

}  // namespace topictrend::embedstore
