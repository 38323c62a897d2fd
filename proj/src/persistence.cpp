#include "topictrend/persistence.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

#include "topictrend/error.hpp"
#include "topictrend/text.hpp"

namespace topictrend::persistence {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "blob I/O assumes a little-endian host");

namespace {

[[noreturn]] void corrupt(const std::string& what) { throw Error(Errc::corrupt_artifact, "corrupt artifact: " + what); }

template <typename T>
constexpr const char* dtype_name() {
  if constexpr (std::is_same_v<T, float>) return "f32";
  else if constexpr (std::is_same_v<T, double>) return "f64";
  else if constexpr (std::is_same_v<T, std::int32_t>) return "i32";
  else if constexpr (std::is_same_v<T, std::int64_t>) return "i64";
  else return "u8";
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class BlobWriter {
 public:
  explicit BlobWriter(fs::path dir) : dir_(std::move(dir)) {}

  template <typename Out, typename Range>
  void numeric(const std::string& name, const Range& values) {
    std::string bytes;
    bytes.reserve(values.size() * sizeof(Out));
    for (const auto& v : values) {
      const Out o = static_cast<Out>(v);
      char buf[sizeof(Out)];
      std::memcpy(buf, &o, sizeof(Out));
      bytes.append(buf, sizeof(Out));
    }
    put(name, name + "." + dtype_name<Out>(), dtype_name<Out>(), values.size(), bytes);
  }

  void lines(const std::string& name, const std::vector<std::string>& values) {
    std::string bytes;
    for (const auto& v : values) {
      if (v.find('\n') != std::string::npos) throw Error(Errc::invalid_argument, name + ": value contains a newline");
      bytes += v;
      bytes += '\n';
    }
    put(name, name + ".txt", "text", values.size(), bytes);
  }

  void document(const std::string& name, const json& j) {
    put(name, name + ".json", "json", 1, j.dump(1) + "\n");
  }

  json entries() const { return entries_; }

 private:
  void put(const std::string& name, const std::string& file, const char* dtype, std::size_t count,
           const std::string& bytes) {
    write_file(dir_ / file, bytes);
    entries_[name] = {{"file", file},
                      {"dtype", dtype},
                      {"count", count},
                      {"bytes", bytes.size()},
                      {"fnv1a64", text::hex64(text::fnv1a64(bytes))}};
  }

  fs::path dir_;
  json entries_ = json::object();
};

class BlobReader {
 public:
  BlobReader(fs::path dir, const json& entries) : dir_(std::move(dir)), entries_(entries) {}

  template <typename Out>
  std::vector<Out> numeric(const std::string& name, std::size_t expected) {
    const std::string bytes = raw(name, dtype_name<Out>(), expected, sizeof(Out));
    std::vector<Out> out(expected);
    if (expected) std::memcpy(out.data(), bytes.data(), bytes.size());
    return out;
  }

  std::vector<std::string> lines(const std::string& name, std::size_t expected) {
    const std::string bytes = raw(name, "text", expected, 0);
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start < bytes.size()) {
      const auto nl = bytes.find('\n', start);
      if (nl == std::string::npos) corrupt("blob '" + name + "' is truncated (unterminated line)");
      out.push_back(bytes.substr(start, nl - start));
      start = nl + 1;
    }
    if (out.size() != expected)
      corrupt("blob '" + name + "' holds " + std::to_string(out.size()) + " lines, manifest says " +
              std::to_string(expected));
    return out;
  }

  json document(const std::string& name) {
    const std::string bytes = raw(name, "json", 1, 0);
    try {
      return json::parse(bytes);
    } catch (const json::exception&) {
      corrupt("blob '" + name + "' is not valid JSON");
    }
  }

 private:
  std::string raw(const std::string& name, const char* dtype, std::size_t expected, std::size_t width) {
    if (!entries_.contains(name)) corrupt("manifest lists no blob '" + name + "'");
    const json& e = entries_.at(name);
    if (e.value("dtype", "") != dtype)
      corrupt("blob '" + name + "' has dtype " + e.value("dtype", "?") + ", expected " + dtype);
    const auto count = e.value("count", std::size_t{0});
    if (count != expected)
      corrupt("manifest/blob count mismatch for '" + name + "': blob entry says " + std::to_string(count) +
              ", manifest counts imply " + std::to_string(expected));
    const fs::path path = dir_ / e.value("file", name);
    if (!fs::exists(path)) corrupt("blob '" + name + "' is missing (" + path.filename().string() + ")");
    std::string bytes = read_file(path);
    const auto declared = e.value("bytes", std::size_t{0});
    if (width && bytes.size() != expected * width)
      corrupt("blob '" + name + "' has " + std::to_string(bytes.size()) + " bytes, expected " +
              std::to_string(expected * width));
    if (bytes.size() != declared)
      corrupt("blob '" + name + "' has " + std::to_string(bytes.size()) + " bytes, manifest says " +
              std::to_string(declared));
    if (text::hex64(text::fnv1a64(bytes)) != e.value("fnv1a64", ""))
      corrupt("blob '" + name + "' fails its checksum");
    return bytes;
  }

  fs::path dir_;
  const json& entries_;
};

json params_json(const cluster::DensityParams& p) {
  return {{"min_cluster_size", p.min_cluster_size},
          {"min_samples", p.min_samples},
          {"metric", cluster::to_string(p.metric)},
          {"selection", cluster::to_string(p.selection)}};
}

Date manifest_date(const json& j, const char* what) {
  const auto d = parse_day(j.get<std::string>());
  if (!d) corrupt(std::string("bad date in manifest field ") + what);
  return *d;
}

}  // namespace

json overlays_to_json(const dynamics::OverlaySeries& overlays) {
  json cases = json::array(), events = json::array();
  for (const auto& c : overlays.cases) cases.push_back({{"date", c.date.iso_day()}, {"value", c.value}});
  for (const auto& e : overlays.events) events.push_back({{"date", e.date.iso_day()}, {"label", e.label}});
  return {{"cases", cases}, {"events", events}};
}

dynamics::OverlaySeries overlays_from_json(const json& j) {
  dynamics::OverlaySeries out;
  try {
    for (const auto& c : j.at("cases")) out.cases.push_back({manifest_date(c.at("date"), "overlays"), c.at("value").get<double>()});
    for (const auto& e : j.at("events")) out.events.push_back({manifest_date(e.at("date"), "overlays"), e.at("label").get<std::string>()});
  } catch (const json::exception& e) {
    corrupt(std::string("overlays: ") + e.what());
  }
  return out;
}

json save_model(const TopicModel& model, const fs::path& dir, bool force) {
  std::error_code ec;
  if (fs::exists(dir) && !force)
    throw Error(Errc::artifact_exists, dir.string() + " already exists (pass --force to replace it)");

  const std::size_t n = model.document_count(), topics = model.topic_count();
  const std::size_t d = model.projection.input_dim(), k = model.projection.components();
  if (model.doc_ids.size() != n || model.doc_dates.size() != n || model.tree.point_cluster.size() != n)
    throw Error(Errc::invalid_argument, "model arrays disagree on the document count");

  fs::path target = fs::absolute(dir);
  const fs::path tmp = target.parent_path() / ("." + target.filename().string() + ".tmp");
  fs::remove_all(tmp, ec);
  if (!fs::create_directories(tmp, ec) && ec)
    throw Error(Errc::io_error, "cannot create " + tmp.string() + ": " + ec.message());

  BlobWriter w(tmp);
  w.numeric<float>("projection_mean", model.projection.mean);
  w.numeric<float>("projection_basis", model.projection.basis.data());
  w.numeric<float>("projection_ratio", model.projection.explained_variance_ratio);
  w.lines("doc_ids", model.doc_ids);
  std::vector<std::int32_t> days;
  for (const auto& date : model.doc_dates) days.push_back(date.days_since_epoch());
  w.numeric<std::int32_t>("doc_days", days);
  w.numeric<std::int32_t>("labels", model.labels);

  std::vector<std::int32_t> parent;
  std::vector<std::int64_t> size;
  std::vector<double> birth, death, stability;
  std::vector<std::uint8_t> flags;
  for (const auto& node : model.tree.nodes) {
    parent.push_back(node.parent);
    size.push_back(static_cast<std::int64_t>(node.size));
    birth.push_back(node.birth_lambda);
    death.push_back(node.death_lambda);
    stability.push_back(node.stability);
    flags.push_back(static_cast<std::uint8_t>((node.leaf ? 1 : 0) | (node.selected ? 2 : 0)));
  }
  w.numeric<std::int32_t>("tree_parent", parent);
  w.numeric<std::int64_t>("tree_size", size);
  w.numeric<double>("tree_birth_lambda", birth);
  w.numeric<double>("tree_death_lambda", death);
  w.numeric<double>("tree_stability", stability);
  w.numeric<std::uint8_t>("tree_flags", flags);
  w.numeric<std::int32_t>("point_cluster", model.tree.point_cluster);
  w.numeric<double>("point_lambda", model.tree.point_lambda);

  const auto& vocab = model.ctfidf.vocabulary;
  w.lines("vocab", vocab.terms);
  w.numeric<std::int64_t>("vocab_freq", vocab.frequency);
  std::vector<std::int64_t> offsets{0};
  std::vector<std::int32_t> indices;
  std::vector<double> values;
  for (const auto& row : model.ctfidf.weights) {
    for (const auto& tw : row) {
      indices.push_back(static_cast<std::int32_t>(tw.term));
      values.push_back(tw.weight);
    }
    offsets.push_back(static_cast<std::int64_t>(indices.size()));
  }
  w.numeric<std::int64_t>("ctfidf_offsets", offsets);
  w.numeric<std::int32_t>("ctfidf_indices", indices);
  w.numeric<float>("ctfidf_values", values);
  w.numeric<std::int64_t>("topic_sizes", model.topic_sizes);
  w.numeric<float>("topic_centroids", model.topic_centroids.data());

  json series = json::array();
  for (const auto& [weeks, ts] : model.series) {
    const std::string prefix = "series_w" + std::to_string(weeks);
    w.numeric<std::int64_t>(prefix + "_counts", ts.counts);
    w.numeric<std::int64_t>(prefix + "_outliers", ts.outliers);
    series.push_back({{"bin_weeks", weeks}, {"origin", ts.origin.iso_day()}, {"bins", ts.bin_count}});
  }
  w.document("overlays", overlays_to_json(model.overlays));

  json manifest = {
      {"format", kFormatName},
      {"format_version", kFormatVersion},
      {"created", model.created},
      {"config_hash", model.config_hash},
      {"seed", model.seed},
      {"stopword_list", {{"id", vocab.stopword_list_id}, {"hash", text::stopword_list_hash()}}},
      {"window", {model.window.start.iso_day(), model.window.end.iso_day()}},
      {"params", params_json(model.params)},
      {"projection", {{"degenerate", model.projection.degenerate}}},
      {"ctfidf",
       {{"average_class_tokens", model.ctfidf.average_class_tokens},
        {"reduce_frequent_words", model.ctfidf.reduce_frequent_words}}},
      {"counts",
       {{"documents", n},
        {"topics", topics},
        {"outliers", model.outlier_count()},
        {"vocabulary", vocab.size()},
        {"nonzeros", indices.size()},
        {"embedding_dim", d},
        {"components", k},
        {"tree_nodes", model.tree.nodes.size()}}},
      {"series", series},
      {"blobs", w.entries()},
  };
  write_file(tmp / "manifest.json", manifest.dump(2) + "\n");

  if (fs::exists(target)) fs::remove_all(target);
  fs::rename(tmp, target, ec);
  if (ec) throw Error(Errc::io_error, "cannot move artifact into " + target.string() + ": " + ec.message());
  return manifest;
}

json read_manifest(const fs::path& dir) {
  const fs::path path = dir / "manifest.json";
  if (!fs::exists(path)) throw Error(Errc::io_error, "no model artifact at " + dir.string() + " (manifest.json missing)");
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    corrupt(std::string("manifest.json: ") + e.what());
  }
}

TopicModel load_model(const fs::path& dir) {
  const json m = read_manifest(dir);
  TopicModel model;
  try {
    if (m.value("format", "") != kFormatName) corrupt("manifest is not a " + std::string(kFormatName) + " manifest");
    const int version = m.at("format_version").get<int>();
    if (version != kFormatVersion)
      throw Error(Errc::unsupported_version, "unsupported artifact format version " + std::to_string(version) +
                                                 " (this build reads version " + std::to_string(kFormatVersion) + ")");
    const auto& sw = m.at("stopword_list");
    if (sw.at("hash").get<std::string>() != text::stopword_list_hash())
      throw Error(Errc::unsupported_version, "artifact was fitted with stopword list " + sw.at("id").get<std::string>() +
                                                 " (" + sw.at("hash").get<std::string>() + "), this build ships " +
                                                 std::string(text::kStopwordListId) + " (" + text::stopword_list_hash() + ")");

    model.created = m.at("created").get<std::string>();
    model.config_hash = m.at("config_hash").get<std::string>();
    model.seed = m.at("seed").get<std::uint64_t>();
    model.window = {manifest_date(m.at("window").at(0), "window"), manifest_date(m.at("window").at(1), "window")};
    const auto& p = m.at("params");
    model.params.min_cluster_size = p.at("min_cluster_size").get<int>();
    model.params.min_samples = p.at("min_samples").get<int>();
    model.params.metric = cluster::metric_from_string(p.at("metric").get<std::string>());
    model.params.selection = cluster::selection_from_string(p.at("selection").get<std::string>());

    const auto& c = m.at("counts");
    const auto n = c.at("documents").get<std::size_t>();
    const auto topics = c.at("topics").get<std::size_t>();
    const auto vocab_size = c.at("vocabulary").get<std::size_t>();
    const auto nnz = c.at("nonzeros").get<std::size_t>();
    const auto d = c.at("embedding_dim").get<std::size_t>();
    const auto k = c.at("components").get<std::size_t>();
    const auto tree_nodes = c.at("tree_nodes").get<std::size_t>();

    BlobReader r(dir, m.at("blobs"));
    auto to_double = [](const auto& v) { return std::vector<double>(v.begin(), v.end()); };
    model.projection.mean = to_double(r.numeric<float>("projection_mean", d));
    model.projection.basis = Matrix(d, k, to_double(r.numeric<float>("projection_basis", d * k)));
    model.projection.explained_variance_ratio = to_double(r.numeric<float>("projection_ratio", k));
    model.projection.degenerate = m.at("projection").at("degenerate").get<bool>();

    model.doc_ids = r.lines("doc_ids", n);
    for (auto day : r.numeric<std::int32_t>("doc_days", n)) model.doc_dates.push_back(Date::from_days(day));
    const auto labels = r.numeric<std::int32_t>("labels", n);
    model.labels.assign(labels.begin(), labels.end());
    for (int l : model.labels) {
      if (l < -1 || l >= static_cast<int>(topics)) corrupt("blob 'labels' holds label " + std::to_string(l) + " outside [-1, topics)");
    }

    const auto parent = r.numeric<std::int32_t>("tree_parent", tree_nodes);
    const auto size = r.numeric<std::int64_t>("tree_size", tree_nodes);
    const auto birth = r.numeric<double>("tree_birth_lambda", tree_nodes);
    const auto death = r.numeric<double>("tree_death_lambda", tree_nodes);
    const auto stability = r.numeric<double>("tree_stability", tree_nodes);
    const auto flags = r.numeric<std::uint8_t>("tree_flags", tree_nodes);
    for (std::size_t i = 0; i < tree_nodes; ++i) {
      if (parent[i] >= static_cast<std::int32_t>(i)) corrupt("blob 'tree_parent' has a parent after its child");
      model.tree.nodes.push_back({static_cast<int>(i), parent[i], birth[i], death[i], static_cast<std::size_t>(size[i]),
                                  stability[i], (flags[i] & 1) != 0, (flags[i] & 2) != 0});
    }
    const auto pc = r.numeric<std::int32_t>("point_cluster", n);
    model.tree.point_cluster.assign(pc.begin(), pc.end());
    model.tree.point_lambda = r.numeric<double>("point_lambda", n);

    auto& vocab = model.ctfidf.vocabulary;
    vocab.terms = r.lines("vocab", vocab_size);
    vocab.frequency = r.numeric<std::int64_t>("vocab_freq", vocab_size);
    vocab.stopword_list_id = sw.at("id").get<std::string>();
    const auto offsets = r.numeric<std::int64_t>("ctfidf_offsets", topics + 1);
    const auto indices = r.numeric<std::int32_t>("ctfidf_indices", nnz);
    const auto values = r.numeric<float>("ctfidf_values", nnz);
    if (offsets.front() != 0 || static_cast<std::size_t>(offsets.back()) != nnz)
      corrupt("blob 'ctfidf_offsets' does not span the nonzeros");
    for (std::size_t t = 0; t < topics; ++t) {
      if (offsets[t + 1] < offsets[t]) corrupt("blob 'ctfidf_offsets' is not monotone");
      std::vector<represent::TermWeight> row;
      for (auto i = offsets[t]; i < offsets[t + 1]; ++i) {
        const auto term = indices[static_cast<std::size_t>(i)];
        if (term < 0 || static_cast<std::size_t>(term) >= vocab_size || (!row.empty() && static_cast<std::uint32_t>(term) <= row.back().term))
          corrupt("blob 'ctfidf_indices' holds an invalid term index");
        row.push_back({static_cast<std::uint32_t>(term), values[static_cast<std::size_t>(i)]});
      }
      model.ctfidf.weights.push_back(std::move(row));
    }
    model.ctfidf.average_class_tokens = m.at("ctfidf").at("average_class_tokens").get<double>();
    model.ctfidf.reduce_frequent_words = m.at("ctfidf").at("reduce_frequent_words").get<bool>();
    model.ctfidf.refresh_norms();

    model.topic_sizes = r.numeric<std::int64_t>("topic_sizes", topics);
    std::vector<std::int64_t> tally(topics, 0);
    for (int l : model.labels) {
      if (l >= 0) ++tally[static_cast<std::size_t>(l)];
    }
    if (tally != model.topic_sizes) corrupt("blob 'topic_sizes' disagrees with 'labels'");
    model.topic_centroids = Matrix(topics, d, to_double(r.numeric<float>("topic_centroids", topics * d)));

    for (const auto& s : m.at("series")) {
      const int weeks = s.at("bin_weeks").get<int>();
      dynamics::check_bin_width(weeks);
      const std::string prefix = "series_w" + std::to_string(weeks);
      dynamics::TopicTimeSeries ts;
      ts.bin_width_weeks = weeks;
      ts.origin = manifest_date(s.at("origin"), "series origin");
      ts.topic_count = topics;
      ts.bin_count = s.at("bins").get<std::size_t>();
      ts.counts = r.numeric<std::int64_t>(prefix + "_counts", topics * ts.bin_count);
      ts.outliers = r.numeric<std::int64_t>(prefix + "_outliers", ts.bin_count);
      dynamics::refresh_intensity(ts);
      model.series.emplace(weeks, std::move(ts));
    }
    model.overlays = overlays_from_json(r.document("overlays"));
  } catch (const json::exception& e) {
    corrupt(std::string("manifest: ") + e.what());
  }
  return model;
}

}  // namespace topictrend::persistence
