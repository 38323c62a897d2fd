#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fixture.hpp"
#include "topictrend/error.hpp"
#include "topictrend/persistence.hpp"
#include "topictrend/pipeline.hpp"

using namespace topictrend;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr discarded and returns its exit status and stdout.
Run cli(const std::string& args) {
  const std::string cmd = std::string("'") + TOPICTREND_CLI + "' " + args + " 2>/dev/null";
  Run r;
  FILE* p = ::popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
  const int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Planted corpus on disk with a small tuning grid, shared by the CLI cases.
struct Workspace {
  fs::path dir, config;
  synth::PlantedOptions options;
};

const Workspace& workspace() {
  static const Workspace w = [] {
    Workspace s;
    s.options.documents = 2500;
    s.options.topics = 4;
    s.options.dim = 64;
    s.dir = synth::scratch_dir("cli");
    const auto corpus = synth::planted_corpus(s.options);
    s.config = synth::write_planted(s.dir, corpus, s.options,
                                    "\n[grid]\nk = [8, 16]\nmin_cluster_size = [60, 100]\nmin_samples = [10]\n"
                                    "subsample = 0.6\n");
    return s;
  }();
  return w;
}

fs::path prepared() {
  static const fs::path p = [] {
    const auto& w = workspace();
    const auto out = w.dir / "prepared";
    const auto r = cli("prepare --config " + q(w.config) + " --out " + q(out));
    REQUIRE(r.code == 0);
    return out;
  }();
  return p;
}

fs::path fitted() {
  static const fs::path p = [] {
    const auto& w = workspace();
    const auto model = w.dir / "model";
    const auto r = cli("fit --config " + q(w.config) + " --corpus " + q(prepared()) + " --out " + q(model));
    REQUIRE(r.code == 0);
    return model;
  }();
  return p;
}

}  // namespace

TEST_CASE("prepare writes the clean corpus and reports provenance") {
  const auto dir = prepared();
  CHECK(fs::exists(dir / "corpus.jsonl"));
  const auto r = cli("prepare --config " + q(workspace().config) + " --out " + q(workspace().dir / "prepared2"));
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["kept"] == workspace().options.documents);
  CHECK(slurp(dir / "corpus.jsonl") == slurp(workspace().dir / "prepared2" / "corpus.jsonl"));
}

TEST_CASE("tune writes the trial table and best parameters") {
  const auto& w = workspace();
  const auto out = w.dir / "tune" / "trials.csv";
  const auto r = cli("tune --config " + q(w.config) + " --corpus " + q(prepared()) + " --out " + q(out));
  REQUIRE(r.code == 0);
  const auto best = json::parse(slurp(w.dir / "tune" / "best.json"));
  CHECK(best["k"].is_number_integer());
  CHECK(best["dbcv"].is_number());
  std::istringstream lines(slurp(out));
  std::string line;
  int rows = -1;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 4);

  const auto model = w.dir / "tuned-model";
  const auto f = cli("fit --config " + q(w.config) + " --corpus " + q(prepared()) + " --out " + q(model) +
                     " --params " + q(w.dir / "tune" / "best.json"));
  REQUIRE(f.code == 0);
  const auto m = persistence::read_manifest(model);
  CHECK(m["params"]["min_cluster_size"] == best["min_cluster_size"]);
  CHECK(m["counts"]["components"] == best["k"]);
}

TEST_CASE("fit refuses to overwrite unless forced, and is deterministic") {
  const auto& w = workspace();
  const auto model = fitted();
  const std::string args = "fit --config " + q(w.config) + " --corpus " + q(prepared()) + " --out ";
  CHECK(cli(args + q(model)).code == 2);
  const auto again = w.dir / "model-again";
  REQUIRE(cli("--threads 2 " + args + q(again)).code == 0);
  for (const char* blob : {"labels", "vocab", "ctfidf_values", "projection_basis", "series_w2_counts"}) {
    const auto file = persistence::read_manifest(model)["blobs"][blob]["file"].get<std::string>();
    CHECK_MESSAGE(slurp(model / file) == slurp(again / file), blob);
  }
  CHECK(cli(args + q(again) + " --force").code == 0);
}

TEST_CASE("export writes clouds, series and heatmap") {
  const auto out = workspace().dir / "export";
  const auto r = cli("export --model " + q(fitted()) + " --out " + q(out) + " --top-n 7");
  REQUIRE(r.code == 0);
  const auto topics = json::parse(slurp(out / "topics.json"));
  REQUIRE(!topics.empty());
  CHECK(topics[0]["terms"].size() == 7);
  for (int w = 1; w <= 4; ++w) CHECK(fs::exists(out / ("series_w" + std::to_string(w) + ".json")));
  CHECK(slurp(out / "heatmap.csv").rfind("topic,2020-01-01..2020-02-29,", 0) == 0);
}

TEST_CASE("test subcommand and its exit codes") {
  const auto model = q(fitted());
  auto r = cli("test --model " + model + " --topic 0 --w1 2020-01-01,2021-03-31 --w2 2021-04-01,2022-06-30");
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["df"] == 1);
  CHECK(j["bin_weeks"] == 2);
  CHECK(j["p"].get<double>() >= 0.0);

  CHECK(cli("test --model " + model + " --topic 0 --w1 2021-03-31 --w2 2021-04-01,2022-06-30").code == 3);
  CHECK(cli("test --model " + model + " --topic 0 --w1 2021-03-31,2020-01-01 --w2 2021-04-01,2022-06-30").code == 3);
  CHECK(cli("test --model " + model + " --topic 99 --w1 2020-01-01,2021-03-31 --w2 2021-04-01,2022-06-30").code == 3);
  CHECK(cli("test --model " + model + " --topic 0 --w1 2020-01-01,2020-01-10 --w2 2021-04-01,2022-06-30").code == 3);
  CHECK(cli("test --model " + model + " --topic 0 --bins 5 --w1 2020-01-01,2021-03-31 --w2 2021-04-01,2022-06-30")
            .code == 2);
  CHECK(cli("test --model " + q(workspace().dir / "nowhere") +
            " --topic 0 --w1 2020-01-01,2021-03-31 --w2 2021-04-01,2022-06-30")
            .code == 2);
}

TEST_CASE("a damaged artifact exits with the I/O code") {
  const auto dir = workspace().dir / "damaged";
  fs::remove_all(dir);
  fs::copy(fitted(), dir, fs::copy_options::recursive);
  const auto file = persistence::read_manifest(dir)["blobs"]["labels"]["file"].get<std::string>();
  fs::resize_file(dir / file, 8);
  CHECK(cli("export --model " + q(dir) + " --out " + q(workspace().dir / "x")).code == 4);
}

TEST_CASE("configuration and usage errors exit 2") {
  const auto& w = workspace();
  CHECK(cli("").code == 2);
  CHECK(cli("frobnicate").code == 2);
  CHECK(cli("prepare --out x").code == 2);
  CHECK(cli("prepare --config " + q(w.dir / "absent.toml") + " --out x").code == 2);

  const auto no_window = w.dir / "no-window.toml";
  std::ofstream(no_window) << "[corpus]\npath = \"corpus.jsonl\"\n";
  CHECK(cli("prepare --config " + q(no_window) + " --out " + q(w.dir / "nw")).code == 2);

  const auto no_emb = w.dir / "no-emb.toml";
  std::ofstream(no_emb) << "[embeddings]\npath = \"missing.bin\"\n";
  CHECK(cli("fit --config " + q(no_emb) + " --corpus " + q(prepared()) + " --out " + q(w.dir / "m2")).code == 2);
  CHECK(cli("fit --config " + q(w.config) + " --corpus " + q(w.dir / "nope") + " --out " + q(w.dir / "m3")).code == 2);

  const auto bad_cluster = w.dir / "bad-cluster.toml";
  std::ofstream(bad_cluster) << "[cluster]\nmin_samples = 0\n";
  CHECK(cli("fit --config " + q(bad_cluster) + " --corpus " + q(prepared()) + " --out " + q(w.dir / "m4")).code == 2);
}

TEST_CASE("explore reports a k and a scatter") {
  const auto& w = workspace();
  const auto out = w.dir / "explore.json";
  const auto r = cli("explore --config " + q(w.config) + " --corpus " + q(prepared()) + " --out " + q(out) +
                     " --k-min 2 --k-max 6");
  REQUIRE(r.code == 0);
  const auto j = json::parse(slurp(out));
  CHECK(j["best_k"].get<int>() >= 2);
  CHECK(j["best_k"].get<int>() <= 6);
}

TEST_CASE("apply_best rejects malformed parameters") {
  pipeline::FitOptions o;
  pipeline::apply_best(o, {{"k", 12}, {"min_cluster_size", 40}, {"min_samples", 5}, {"metric", "cosine"},
                           {"selection", "eom"}});
  CHECK(o.k == 12);
  CHECK(o.params.metric == Metric::cosine);
  CHECK(o.params.selection == cluster::Selection::eom);
  auto code = [&](const json& best) {
    try {
      pipeline::apply_best(o, best);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::invalid_argument;
  };
  CHECK(code({{"k", "twelve"}}) == Errc::config_error);
  CHECK(code({{"k", 12}, {"min_cluster_size", 40}, {"min_samples", 5}, {"metric", "l1"}, {"selection", "eom"}}) ==
        Errc::config_error);
  CHECK(code({{"k", 12}, {"min_cluster_size", 4}, {"min_samples", 5}, {"metric", "cosine"}, {"selection", "eom"}}) ==
        Errc::config_error);
}
