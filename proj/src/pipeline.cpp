#include "topictrend/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>

#include "topictrend/dynamics.hpp"
#include "topictrend/error.hpp"
#include "topictrend/reduce.hpp"
#include "topictrend/represent.hpp"

namespace topictrend::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

ingest::Field field_named(const std::string& key, const std::string& name) {
  auto f = ingest::field_from_name(name);
  if (!f) throw Error(Errc::config_error, "config key '" + key + "': unknown field '" + name + "'");
  return *f;
}

std::string lower_ext(const fs::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::uint64_t seed_from(const config::Config& cfg) {
  const auto seed = cfg.integer_or("seed", 0);
  if (seed < 0) throw Error(Errc::config_error, "config key 'seed' must be non-negative");
  return static_cast<std::uint64_t>(seed);
}

ingest::Schema schema_from(const config::Config& cfg) {
  auto schema = ingest::default_schema();
  for (const auto& [name, column] : cfg.section("corpus.schema")) {
    const std::string key = "corpus.schema." + name;
    if (!column.is_string()) throw Error(Errc::config_error, "config key '" + key + "' must be a string");
    schema[field_named(key, name)] = column.get<std::string>();
  }
  return schema;
}

ingest::FilterOptions filter_options_from(const config::Config& cfg) {
  ingest::FilterOptions opt;
  const auto window = cfg.strings("filter.window");
  if (window.size() != 2) throw Error(Errc::config_error, "config key 'filter.window' needs [start, end]");
  const auto start = parse_day(window[0]), end = parse_day(window[1]);
  if (!start || !end || end->day < start->day)
    throw Error(Errc::config_error, "config key 'filter.window' must hold two ISO days, start <= end");
  opt.window = {*start, *end};
  if (cfg.has("filter.required")) {
    opt.required.clear();
    for (const auto& name : cfg.strings("filter.required")) opt.required.insert(field_named("filter.required", name));
  }
  opt.language.stopword_threshold = cfg.number_or("filter.language_threshold", opt.language.stopword_threshold);
  const auto min_tokens = cfg.integer_or("filter.language_min_tokens", static_cast<std::int64_t>(opt.language.min_tokens));
  if (min_tokens < 0) throw Error(Errc::config_error, "config key 'filter.language_min_tokens' must be >= 0");
  opt.language.min_tokens = static_cast<std::size_t>(min_tokens);
  return opt;
}

ingest::InputFormat corpus_format_from(const config::Config& cfg, const fs::path& path) {
  const std::string f = cfg.string_or("corpus.format", lower_ext(path) == ".jsonl" ? "jsonl" : "csv");
  if (f == "csv") return ingest::InputFormat::csv;
  if (f == "jsonl") return ingest::InputFormat::jsonl;
  throw Error(Errc::config_error, "config key 'corpus.format' must be csv or jsonl");
}

embedstore::Format embedding_format_from(const config::Config& cfg, const fs::path& path) {
  std::string f = cfg.string_or("embeddings.format", "");
  if (f.empty()) {
    const auto ext = lower_ext(path);
    f = ext == ".csv" ? "csv" : ext == ".jsonl" ? "jsonl" : "binary";
  }
  if (f == "binary") return embedstore::Format::binary;
  if (f == "csv") return embedstore::Format::csv;
  if (f == "jsonl") return embedstore::Format::jsonl;
  throw Error(Errc::config_error, "config key 'embeddings.format' must be binary, csv or jsonl");
}

tune::Grid grid_from(const config::Config& cfg) {
  tune::Grid g;
  auto positive = [&](const std::string& key) {
    std::vector<std::int64_t> v = cfg.integers(key);
    for (auto x : v) {
      if (x <= 0) throw Error(Errc::config_error, "config key '" + key + "' needs positive integers");
    }
    return v;
  };
  if (cfg.has("grid.k")) {
    g.k.clear();
    for (auto v : positive("grid.k")) g.k.push_back(static_cast<std::size_t>(v));
  } else if (cfg.has("reduce.k")) {
    g.k = {static_cast<std::size_t>(positive("reduce.k").front())};
  }
  if (cfg.has("grid.min_cluster_size")) {
    g.min_cluster_size.clear();
    for (auto v : positive("grid.min_cluster_size")) g.min_cluster_size.push_back(static_cast<int>(v));
  }
  if (cfg.has("grid.min_samples")) {
    g.min_samples.clear();
    for (auto v : positive("grid.min_samples")) g.min_samples.push_back(static_cast<int>(v));
  }
  try {
    if (cfg.has("grid.metric")) {
      g.metric.clear();
      for (const auto& s : cfg.strings("grid.metric")) g.metric.push_back(cluster::metric_from_string(s));
    }
    if (cfg.has("grid.selection")) {
      g.selection.clear();
      for (const auto& s : cfg.strings("grid.selection")) g.selection.push_back(cluster::selection_from_string(s));
    }
  } catch (const Error& e) {
    if (e.code() == Errc::config_error) throw;
    throw Error(Errc::config_error, std::string("grid: ") + e.what());
  }
  if (g.combinations() == 0) throw Error(Errc::config_error, "grid has an empty value list");
  return g;
}

tune::TuneOptions tune_options_from(const config::Config& cfg) {
  tune::TuneOptions opt;
  opt.subsample_fraction = cfg.number_or("grid.subsample", opt.subsample_fraction);
  if (!(opt.subsample_fraction > 0.0 && opt.subsample_fraction <= 1.0))
    throw Error(Errc::config_error, "config key 'grid.subsample' must lie in (0, 1]");
  opt.base_seed = seed_from(cfg);
  return opt;
}

ingest::FetchConfig fetch_config_from(const config::Config& cfg) {
  ingest::FetchConfig f;
  f.base_url = cfg.string("fetch.base_url");
  f.query = cfg.string("fetch.query");
  f.query_param = cfg.string_or("fetch.query_param", f.query_param);
  f.page_param = cfg.string_or("fetch.page_param", f.page_param);
  f.page_size = static_cast<std::size_t>(cfg.integer_or("fetch.page_size", static_cast<std::int64_t>(f.page_size)));
  f.page_size_param = cfg.string_or("fetch.page_size_param", f.page_size_param);
  f.page_mode = cfg.string_or("fetch.page_mode", f.page_mode);
  f.api_key_env = cfg.string_or("fetch.api_key_env", f.api_key_env);
  f.api_key_param = cfg.string_or("fetch.api_key_param", f.api_key_param);
  f.records_pointer = cfg.string_or("fetch.records_pointer", f.records_pointer);
  f.max_pages = static_cast<std::size_t>(cfg.integer_or("fetch.max_pages", static_cast<std::int64_t>(f.max_pages)));
  if (f.page_size == 0) throw Error(Errc::config_error, "config key 'fetch.page_size' must be positive");
  if (f.page_mode != "offset" && f.page_mode != "index")
    throw Error(Errc::config_error, "config key 'fetch.page_mode' must be offset or index");
  return f;
}

Prepared prepare_records(const config::Config& cfg, ingest::ParseResult parsed) {
  Prepared out;
  const auto options = filter_options_from(cfg);
  out.profile = ingest::profile_corpus(parsed.records);
  out.corpus = ingest::prepare_corpus(parsed.records, options);
  out.skipped = std::move(parsed.skipped);
  return out;
}

Prepared prepare(const config::Config& cfg) {
  const fs::path path = cfg.path_or_empty("corpus.path");
  if (path.empty()) throw Error(Errc::config_error, "missing config key 'corpus.path'");
  const auto schema = schema_from(cfg);
  const auto format = corpus_format_from(cfg, path);
  filter_options_from(cfg);  // report config problems before reading data
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open corpus " + path.string());
  return prepare_records(cfg, ingest::parse_metadata(in, format, schema));
}

embedstore::EmbeddingMatrix load_embeddings(const config::Config& cfg, const fs::path& path) {
  return embedstore::load_embeddings(path, embedding_format_from(cfg, path));
}

FitOptions fit_options_from(const config::Config& cfg) {
  FitOptions opt;
  const auto k = cfg.integer_or("reduce.k", static_cast<std::int64_t>(opt.k));
  if (k <= 0) throw Error(Errc::config_error, "config key 'reduce.k' must be positive");
  opt.k = static_cast<std::size_t>(k);
  opt.params.min_cluster_size = static_cast<int>(cfg.integer_or("cluster.min_cluster_size", opt.params.min_cluster_size));
  opt.params.min_samples = static_cast<int>(cfg.integer_or("cluster.min_samples", opt.params.min_samples));
  try {
    opt.params.metric = cluster::metric_from_string(cfg.string_or("cluster.metric", "euclidean"));
    opt.params.selection = cluster::selection_from_string(cfg.string_or("cluster.selection", "leaf"));
    opt.params.validate();
  } catch (const Error& e) {
    if (e.code() == Errc::config_error) throw;
    throw Error(Errc::config_error, std::string("cluster: ") + e.what());
  }
  opt.reduce_frequent_words = cfg.boolean_or("represent.reduce_frequent_words", true);
  opt.seed = seed_from(cfg);
  opt.config_hash = cfg.hash();
  opt.cases = cfg.path_or_empty("overlays.cases");
  opt.events = cfg.path_or_empty("overlays.events");
  return opt;
}

json best_json(const tune::TuneResult& result) {
  const auto& t = result.best_trial();
  return {{"trial", t.index},
          {"k", t.params.k},
          {"min_cluster_size", t.params.density.min_cluster_size},
          {"min_samples", t.params.density.min_samples},
          {"metric", cluster::to_string(t.params.density.metric)},
          {"selection", cluster::to_string(t.params.density.selection)},
          {"dbcv", *t.dbcv},
          {"clusters", t.clusters},
          {"outlier_fraction", t.outlier_fraction},
          {"seed", t.seed}};
}

void apply_best(FitOptions& options, const json& best) {
  try {
    options.k = best.at("k").get<std::size_t>();
    options.params.min_cluster_size = best.at("min_cluster_size").get<int>();
    options.params.min_samples = best.at("min_samples").get<int>();
    options.params.metric = cluster::metric_from_string(best.at("metric").get<std::string>());
    options.params.selection = cluster::selection_from_string(best.at("selection").get<std::string>());
    options.params.validate();
  } catch (const json::exception& e) {
    throw Error(Errc::config_error, std::string("best parameters file: ") + e.what());
  } catch (const Error& e) {
    throw Error(Errc::config_error, std::string("best parameters file: ") + e.what());
  }
}

TopicModel fit(const ingest::CleanCorpus& corpus, const embedstore::EmbeddingMatrix& embeddings,
               const FitOptions& options) {
  const auto aligned = embedstore::align(corpus, embeddings);
  const Matrix& x = aligned.embeddings.vectors;
  const auto& records = aligned.corpus.records;

  TopicModel model;
  model.config_hash = options.config_hash;
  model.created = utc_now();
  model.seed = options.seed;
  model.window = corpus.window;
  model.params = options.params;

  model.projection = reduce::pca_fit(x, options.k);
  const Matrix reduced = reduce::pca_transform(model.projection, x);
  auto clustering = cluster::density_cluster(reduced, options.params);
  model.labels = clustering.assignment.labels;
  model.tree = std::move(clustering.tree);
  const auto topics = static_cast<std::size_t>(clustering.assignment.cluster_count);

  std::vector<std::string> abstracts;
  for (const auto& r : records) {
    model.doc_ids.push_back(r.record_id);
    model.doc_dates.push_back(*r.publish_date);
    abstracts.push_back(r.abstract_text.value_or(""));
  }
  model.ctfidf = represent::class_tfidf(represent::build_class_counts(abstracts, model.labels),
                                        options.reduce_frequent_words);

  model.topic_sizes.assign(topics, 0);
  model.topic_centroids = Matrix(topics, x.cols());
  for (std::size_t i = 0; i < model.labels.size(); ++i) {
    if (model.labels[i] < 0) continue;
    const auto t = static_cast<std::size_t>(model.labels[i]);
    ++model.topic_sizes[t];
    auto row = x.row(i);
    for (std::size_t j = 0; j < x.cols(); ++j) model.topic_centroids(t, j) += row[j];
  }
  for (std::size_t t = 0; t < topics; ++t) {
    for (std::size_t j = 0; j < x.cols(); ++j) model.topic_centroids(t, j) /= static_cast<double>(model.topic_sizes[t]);
  }

  const Date origin = corpus.window.start;
  for (int weeks = dynamics::kMinBinWeeks; weeks <= dynamics::kMaxBinWeeks; ++weeks) {
    const auto bins = dynamics::assign_bins(model.doc_dates, weeks, origin);
    model.series.emplace(weeks, dynamics::build_series(model.labels, bins, topics, weeks, origin,
                                                       dynamics::bins_through(origin, corpus.window.end, weeks)));
  }
  model.overlays = dynamics::load_overlays(options.cases, options.events);
  quantize(model);
  return model;
}

json explore(const ingest::CleanCorpus& corpus, const embedstore::EmbeddingMatrix& embeddings,
             const ExploreOptions& options) {
  const auto aligned = embedstore::align(corpus, embeddings);
  const Matrix& x = aligned.embeddings.vectors;
  const std::size_t n = x.rows();
  if (options.k_min < 2 || options.k_max < options.k_min || static_cast<std::size_t>(options.k_max) > n)
    throw Error(Errc::invalid_argument, "k range must satisfy 2 <= k_min <= k_max <= n");

  Matrix data = x;
  if (options.components > 0) {
    const auto p = reduce::pca_fit(x, std::min(options.components, std::min(n, x.cols())));
    data = reduce::pca_transform(p, x);
  }
  const auto selection = cluster::select_k(data, options.k_min, options.k_max, options.seed, options.restarts);
  const auto km = cluster::kmeans_best_of(data, selection.best_k,
                                         options.seed + static_cast<std::uint64_t>(selection.best_k), options.restarts);

  json scores = json::array();
  for (const auto& [k, s] : selection.scores) scores.push_back({{"k", k}, {"silhouette", s}});

  std::vector<std::string> abstracts;
  for (const auto& r : aligned.corpus.records) abstracts.push_back(r.abstract_text.value_or(""));
  const auto macro = represent::class_tfidf(represent::build_class_counts(abstracts, km.assignment.labels), true);
  json clusters = json::array();
  const auto sizes = km.assignment.sizes();
  for (int c = 0; c < km.assignment.cluster_count; ++c) {
    json terms = json::array();
    for (const auto& t : represent::top_terms(macro, c, options.top_n)) terms.push_back({{"term", t.term}, {"weight", t.weight}});
    clusters.push_back({{"cluster", c}, {"size", sizes[static_cast<std::size_t>(c)]}, {"terms", terms}});
  }

  const auto plane = reduce::pca_fit(x, std::min<std::size_t>(2, std::min(n, x.cols())));
  const Matrix xy = reduce::pca_transform(plane, x);
  const auto shown = embedstore::subsample_indices(n, std::min(1.0, static_cast<double>(options.scatter_points) / static_cast<double>(n)), options.seed);
  json scatter = json::array();
  for (auto i : shown) {
    scatter.push_back({{"id", aligned.embeddings.ids[i]},
                       {"x", xy(i, 0)},
                       {"y", xy.cols() > 1 ? xy(i, 1) : 0.0},
                       {"cluster", km.assignment.labels[i]}});
  }
  return {{"documents", n},
          {"silhouette", scores},
          {"best_k", selection.best_k},
          {"explained_variance_ratio", plane.explained_variance_ratio},
          {"clusters", clusters},
          {"scatter", scatter}};
}

}  // namespace topictrend::pipeline
