// topictrend: prepare -> tune -> fit -> export / test / serve.
//
// Exit codes: 0 success, 2 usage or config error, 3 domain error, 4 I/O error.

#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "topictrend/config.hpp"
#include "topictrend/corpus_io.hpp"
#include "topictrend/dynamics.hpp"
#include "topictrend/error.hpp"
#include "topictrend/kernels.hpp"
#include "topictrend/persistence.hpp"
#include "topictrend/pipeline.hpp"
#include "topictrend/represent.hpp"
#include "topictrend/service.hpp"
#include "topictrend/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace topictrend;

namespace {

constexpr int kUsage = 2;
constexpr int kDomain = 3;
constexpr int kIo = 4;

int exit_code(Errc code) {
  switch (code) {
    case Errc::config_error:
    case Errc::artifact_exists:
      return kUsage;
    case Errc::io_error:
    case Errc::parse_error:
    case Errc::corrupt_artifact:
    case Errc::unsupported_version:
      return kIo;
    default:
      return kDomain;
  }
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

config::Config load_config(const std::string& path) {
  if (path.empty()) return {};
  return config::Config::load(path);
}

// The --emb flag, else embeddings.path from the config. A missing file is a
// usage error.
fs::path embeddings_path(const config::Config& cfg, const std::string& flag) {
  fs::path p = flag.empty() ? cfg.path_or_empty("embeddings.path") : fs::path(flag);
  if (p.empty()) throw UsageError("no embeddings given (--emb or embeddings.path)");
  if (!fs::exists(p)) throw UsageError("embeddings file not found: " + p.string());
  return p;
}

fs::path corpus_dir(const std::string& flag) {
  if (!fs::exists(fs::path(flag) / "corpus.jsonl")) throw UsageError("not a prepared corpus directory: " + flag);
  return flag;
}

// A bad window is a domain error (exit 3), like a window the test rejects.
DateRange window_arg(const std::string& name, const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw Error(Errc::invalid_argument, name + " must look like START,END");
  const auto a = parse_day(text.substr(0, comma)), b = parse_day(text.substr(comma + 1));
  if (!a || !b || b->day < a->day)
    throw Error(Errc::invalid_argument, name + " must hold two ISO days, START <= END");
  return {*a, *b};
}

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

volatile std::sig_atomic_t g_stop = 0;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal topic mining over embedded document corpora"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Cap on worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

  std::string config_path, out, corpus, emb, model_dir, params_path, best_path, bind, static_dir;
  std::string w1, w2;
  std::vector<std::string> cors;
  bool force = false;
  int topic = -1, bins = 2, k_min = 2, k_max = 60;
  double alpha = 0.05;

  auto* prepare = app.add_subcommand("prepare", "Parse, filter, deduplicate and profile the raw corpus");
  prepare->add_option("--config", config_path, "Run config")->required();
  prepare->add_option("--out", out, "Output directory")->required();

  auto* fetch = app.add_subcommand("fetch", "Download records from a paged JSON API into JSON lines");
  fetch->add_option("--config", config_path, "Run config (fetch.* keys)")->required();
  fetch->add_option("--out", out, "Output .jsonl file")->required();

  auto* tune = app.add_subcommand("tune", "Grid search clustering parameters by DBCV on subsamples");
  tune->add_option("--config", config_path, "Run config")->required();
  tune->add_option("--corpus", corpus, "Prepared corpus directory")->required();
  tune->add_option("--emb", emb, "Embeddings file (default: embeddings.path)");
  tune->add_option("--out", out, "Trial table CSV")->required();
  tune->add_option("--best", best_path, "Best parameters JSON (default: best.json next to --out)");

  auto* fit = app.add_subcommand("fit", "Fit the topic model on the full corpus and save the artifact");
  fit->add_option("--config", config_path, "Run config")->required();
  fit->add_option("--corpus", corpus, "Prepared corpus directory")->required();
  fit->add_option("--emb", emb, "Embeddings file (default: embeddings.path)");
  fit->add_option("--out", out, "Model artifact directory")->required();
  fit->add_option("--params", params_path, "best.json from the tune stage");
  fit->add_flag("--force", force, "Replace an existing artifact");

  auto* exp = app.add_subcommand("export", "Write word clouds, series and the interval heatmap");
  exp->add_option("--model", model_dir, "Model artifact directory")->required();
  exp->add_option("--out", out, "Output directory")->required();
  std::size_t top_n = 30;
  exp->add_option("--top-n", top_n, "Terms per topic")->check(CLI::PositiveNumber);
  exp->add_option("--config", config_path, "Run config (represent.top_n)");

  auto* test = app.add_subcommand("test", "Kruskal-Wallis test of a topic's intensity in two windows");
  test->add_option("--model", model_dir, "Model artifact directory")->required();
  test->add_option("--topic", topic, "Topic id")->required();
  test->add_option("--w1", w1, "First window START,END")->required();
  test->add_option("--w2", w2, "Second window START,END")->required();
  test->add_option("--bins", bins, "Bin width in weeks (1-4)")->check(CLI::Range(1, 4));
  test->add_option("--alpha", alpha, "Significance level")->check(CLI::Range(0.0, 1.0));

  auto* serve = app.add_subcommand("serve", "Serve the JSON API over a fitted model");
  serve->add_option("--model", model_dir, "Model artifact directory (default: serve.model_dir)");
  serve->add_option("--bind", bind, "host:port (default: serve.bind_addr or 127.0.0.1:8080)");
  serve->add_option("--cors", cors, "Allowed CORS origins (default: serve.cors_origins)");
  serve->add_option("--static", static_dir, "Directory of dashboard assets to serve at /");
  serve->add_option("--config", config_path, "Run config");

  auto* explore = app.add_subcommand("explore", "k-means feasibility pass: silhouette over k, macro-topic terms, 2-D scatter");
  explore->add_option("--config", config_path, "Run config");
  explore->add_option("--corpus", corpus, "Prepared corpus directory")->required();
  explore->add_option("--emb", emb, "Embeddings file (default: embeddings.path)");
  explore->add_option("--out", out, "Report JSON")->required();
  explore->add_option("--k-min", k_min, "Smallest k")->check(CLI::Range(2, 100000));
  explore->add_option("--k-max", k_max, "Largest k")->check(CLI::Range(2, 100000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    kernels::set_thread_count(threads);

    if (*prepare) {
      const auto cfg = load_config(config_path);
      const auto prepared = pipeline::prepare(cfg);
      ingest::write_clean_corpus(out, prepared.corpus, prepared.profile, prepared.skipped.size());
      for (const auto& s : prepared.skipped) std::cerr << "skipped line " << s.line << ": " << s.message << '\n';
      json prov = ingest::to_json(prepared.corpus.provenance);
      prov["kept"] = prepared.corpus.records.size();
      prov["skipped_rows"] = prepared.skipped.size();
      print_json(prov);
    } else if (*fetch) {
      const auto cfg = load_config(config_path);
      const auto records = ingest::fetch_corpus(pipeline::fetch_config_from(cfg));
      std::string text;
      for (const auto& r : records) text += r.dump() + "\n";
      write_text(out, text);
      print_json({{"records", records.size()}, {"out", out}});
    } else if (*tune) {
      const auto cfg = load_config(config_path);
      const auto grid = pipeline::grid_from(cfg);
      const auto options = pipeline::tune_options_from(cfg);
      const auto c = ingest::read_clean_corpus(corpus_dir(corpus));
      const auto e = pipeline::load_embeddings(cfg, embeddings_path(cfg, emb));
      const auto aligned = embedstore::align(c, e);
      const auto result = tune::grid_search(aligned.embeddings.vectors, grid, options);
      write_text(out, tune::trials_csv(result));
      const fs::path best = best_path.empty() ? fs::path(out).parent_path() / "best.json" : fs::path(best_path);
      const json b = pipeline::best_json(result);
      write_text(best, b.dump(2) + "\n");
      print_json(b);
    } else if (*fit) {
      const auto cfg = load_config(config_path);
      auto options = pipeline::fit_options_from(cfg);
      if (!params_path.empty()) {
        json best;
        try {
          best = json::parse(read_text(params_path));
        } catch (const json::parse_error&) {
          throw Error(Errc::config_error, "--params file is not JSON: " + params_path);
        }
        pipeline::apply_best(options, best);
      }
      if (fs::exists(out) && !force) throw Error(Errc::artifact_exists, out + " already exists (pass --force to replace it)");
      const auto c = ingest::read_clean_corpus(corpus_dir(corpus));
      const auto e = pipeline::load_embeddings(cfg, embeddings_path(cfg, emb));
      if (e.nonstandard_dim())
        std::cerr << "warning: embeddings have " << e.dim() << " dimensions (reference contract is "
                  << embedstore::kReferenceDim << ")\n";
      const auto model = pipeline::fit(c, e, options);
      const json manifest = persistence::save_model(model, out, force);
      print_json(manifest.at("counts"));
    } else if (*exp) {
      const auto model = persistence::load_model(model_dir);
      if (!config_path.empty() && exp->count("--top-n") == 0) {
        top_n = static_cast<std::size_t>(load_config(config_path).integer_or("represent.top_n", 30));
      }
      json topics = json::array();
      for (std::size_t t = 0; t < model.topic_count(); ++t) {
        json terms = json::array();
        for (const auto& s : represent::top_terms(model.ctfidf, static_cast<int>(t), top_n))
          terms.push_back({{"term", s.term}, {"weight", s.weight}});
        topics.push_back({{"topic_id", t}, {"size", model.topic_sizes[t]}, {"terms", terms}});
      }
      write_text(fs::path(out) / "topics.json", topics.dump(1) + "\n");
      for (const auto& [weeks, ts] : model.series) {
        json all = json::array();
        for (std::size_t t = 0; t < ts.topic_count; ++t) {
          json points = json::array();
          for (std::size_t b = 0; b < ts.bin_count; ++b)
            points.push_back({{"bin_start", ts.bin_start(b).iso_day()}, {"count", ts.count(t, b)}, {"intensity", ts.intensity_at(t, b)}});
          all.push_back({{"topic_id", t}, {"points", points}});
        }
        write_text(fs::path(out) / ("series_w" + std::to_string(weeks) + ".json"), all.dump(1) + "\n");
      }
      const auto& ts2 = model.series_for(2);
      write_text(fs::path(out) / "heatmap.csv", dynamics::heatmap_csv(ts2, dynamics::month_intervals(model.window, 2)));
      print_json({{"topics", model.topic_count()}, {"out", out}});
    } else if (*test) {
      const DateRange a = window_arg("--w1", w1), b = window_arg("--w2", w2);
      if (!fs::exists(fs::path(model_dir) / "manifest.json")) throw UsageError("no model artifact at " + model_dir);
      const auto model = std::make_shared<const TopicModel>(persistence::load_model(model_dir));
      service::Api api(model);
      const json body = {{"topic_id", topic},
                         {"window1", {a.start.iso_day(), a.end.iso_day()}},
                         {"window2", {b.start.iso_day(), b.end.iso_day()}},
                         {"bin_weeks", bins},
                         {"alpha", alpha}};
      const auto res = api.run_test(body.dump());
      print_json(res.body);
    } else if (*serve) {
      const auto cfg = load_config(config_path);
      if (model_dir.empty()) model_dir = cfg.path_or_empty("serve.model_dir").string();
      if (model_dir.empty()) throw UsageError("no model directory (--model or serve.model_dir)");
      if (!fs::exists(fs::path(model_dir) / "manifest.json")) throw UsageError("no model artifact at " + model_dir);
      service::ServiceConfig sc;
      sc.bind_addr = bind.empty() ? cfg.string_or("serve.bind_addr", sc.bind_addr) : bind;
      sc.cors_origins = !cors.empty() ? cors : cfg.has("serve.cors_origins") ? cfg.strings("serve.cors_origins") : std::vector<std::string>{};
      sc.static_dir = static_dir.empty() ? cfg.path_or_empty("serve.static_dir").string() : static_dir;
      const auto model = std::make_shared<const TopicModel>(persistence::load_model(model_dir));
      service::Server server(model, sc);
      const auto host = service::parse_bind_addr(sc.bind_addr).first;
      const int port = server.start();
      std::signal(SIGINT, [](int) { g_stop = 1; });
      std::signal(SIGTERM, [](int) { g_stop = 1; });
      std::cerr << "serving " << model->topic_count() << " topics on http://" << host << ":" << port << '\n';
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      server.stop();
    } else if (*explore) {
      const auto cfg = load_config(config_path);
      pipeline::ExploreOptions opt;
      opt.k_min = k_min;
      opt.k_max = k_max;
      opt.seed = pipeline::seed_from(cfg);
      opt.top_n = static_cast<std::size_t>(cfg.integer_or("represent.top_n", 30));
      opt.components = static_cast<std::size_t>(cfg.integer_or("explore.components", 50));
      const auto c = ingest::read_clean_corpus(corpus_dir(corpus));
      const auto e = pipeline::load_embeddings(cfg, embeddings_path(cfg, emb));
      const json report = pipeline::explore(c, e, opt);
      write_text(out, report.dump(1) + "\n");
      print_json({{"best_k", report.at("best_k")}, {"out", out}});
    }
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error [" << e.name() << "]: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomain;
  }
}
