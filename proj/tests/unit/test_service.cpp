#include <doctest.h>

#include <httplib.h>

#include "check.hpp"
#include "fixture.hpp"
#include "topictrend/service.hpp"

using namespace topictrend;
using namespace topictrend::service;
using nlohmann::json;

namespace {

const Api& api() {
  static const Api a(synth::small_model().reloaded);
  return a;
}

Response get(const std::string& path, std::map<std::string, std::string> query = {}) {
  return api().handle({"GET", path, std::move(query), ""});
}

Response post(const std::string& path, const json& body) { return api().handle({"POST", path, {}, body.dump()}); }

std::string code_of(const Response& r) { return r.body["error"]["code"].get<std::string>(); }

json test_body(int topic) {
  const auto& o = synth::small_model().options;
  return {{"topic_id", topic},
          {"window1", {o.start.iso(), Date::from_days(o.step.days_since_epoch() - 1).iso()}},
          {"window2", {o.step.iso(), o.end.iso()}}};
}

}  // namespace

TEST_CASE("every error code has one status") {
  CHECK(http_status(Errc::topic_not_found) == 404);
  for (Errc e : {Errc::window_too_narrow, Errc::degenerate_ties, Errc::empty_group, Errc::no_bins_in_interval})
    CHECK(http_status(e) == 422);
  for (Errc e : {Errc::invalid_argument, Errc::parse_error, Errc::no_searchable_terms, Errc::dimension_mismatch})
    CHECK(http_status(e) == 400);
  CHECK(http_status(Errc::corrupt_artifact) == 500);
  const auto r = error_response(Error(Errc::topic_not_found, "topic 9 does not exist"));
  CHECK(r.body["status"] == 404);
  CHECK(r.body["error"]["message"] == "topic 9 does not exist");
}

TEST_CASE("health and model info") {
  const auto& m = *synth::small_model().reloaded;
  auto r = get("/healthz");
  CHECK(r.status == 200);
  CHECK(r.body["status"] == "ok");
  r = get("/api/v1/model");
  CHECK(r.status == 200);
  CHECK(r.body["counts"]["topics"] == m.topic_count());
  CHECK(r.body["counts"]["documents"] == m.document_count());
  CHECK(r.body["bin_weeks"] == json::array({1, 2, 3, 4}));
  CHECK(r.body["params"]["selection"] == "leaf");
}

TEST_CASE("keyword search returns topic cards") {
  const auto& s = synth::small_model();
  const std::string kw = s.corpus.keywords[1];
  auto r = get("/api/v1/topics/search", {{"q", kw}});
  REQUIRE(r.status == 200);
  CHECK(r.body["n"] == kDefaultResults);
  CHECK(r.body["status"] == "ok");
  REQUIRE(!r.body["topics"].empty());
  const auto& card = r.body["topics"][0];
  CHECK(card["terms"].size() <= kCardTerms);
  bool found = false;
  for (std::size_t i = 0; i < 5 && i < card["terms"].size(); ++i) found = found || card["terms"][i]["term"] == kw;
  CHECK(found);
  double prev = 2.0;
  for (const auto& t : r.body["topics"]) {
    CHECK(t["similarity"].get<double>() <= prev);
    prev = t["similarity"].get<double>();
  }

  CHECK(get("/api/v1/topics/search", {{"q", kw}, {"n", "500"}}).body["n"] == kMaxResults);
  CHECK(get("/api/v1/topics/search", {{"q", "zzzunknownzzz"}}).body["status"] == "no_match");
  r = get("/api/v1/topics/search", {{"q", ""}});
  CHECK(r.status == 400);
  CHECK(code_of(r) == "no_searchable_terms");
  CHECK(get("/api/v1/topics/search").status == 400);
  CHECK(get("/api/v1/topics/search", {{"q", kw}, {"n", "0"}}).status == 400);
  CHECK(get("/api/v1/topics/search", {{"q", kw}, {"n", "two"}}).status == 400);
}

TEST_CASE("embedding search") {
  const auto& m = *synth::small_model().reloaded;
  std::vector<double> v(m.topic_centroids.row(2).begin(), m.topic_centroids.row(2).end());
  auto r = post("/api/v1/topics/search_by_embedding", {{"vector", v}, {"n", 3}});
  REQUIRE(r.status == 200);
  CHECK(r.body["topics"][0]["topic_id"] == 2);
  CHECK(r.body["topics"].size() <= 3);
  r = post("/api/v1/topics/search_by_embedding", {{"vector", {1.0, 2.0}}});
  CHECK(r.status == 400);
  CHECK(code_of(r) == "dimension_mismatch");
  CHECK(post("/api/v1/topics/search_by_embedding", {{"vector", "x"}}).status == 400);
  CHECK(api().handle({"POST", "/api/v1/topics/search_by_embedding", {}, "{oops"}).status == 400);
}

TEST_CASE("series endpoint") {
  const auto& m = *synth::small_model().reloaded;
  auto r = get("/api/v1/topics/0/series");
  REQUIRE(r.status == 200);
  CHECK(r.body["bin_weeks"] == kDefaultBinWeeks);
  CHECK(r.body["points"].size() == m.series_for(2).bin_count);
  r = get("/api/v1/topics/1/series", {{"bin_weeks", "4"}, {"from", "2021-01-01"}, {"to", "2021-03-31"}});
  REQUIRE(r.status == 200);
  for (const auto& p : r.body["points"]) {
    const auto d = p["bin_start"].get<std::string>();
    CHECK(d >= "2021-01-01");
    CHECK(d <= "2021-03-31");
  }
  r = get("/api/v1/topics/0/series", {{"bin_weeks", "5"}});
  CHECK(r.status == 400);
  CHECK(code_of(r) == "invalid_argument");
  CHECK(get("/api/v1/topics/99/series").status == 404);
  CHECK(get("/api/v1/topics/abc/series").status == 404);
  CHECK(get("/api/v1/topics/0/series", {{"from", "2021-13-01"}}).status == 400);
}

TEST_CASE("window test endpoint") {
  auto r = post("/api/v1/tests", test_body(0));
  REQUIRE(r.status == 200);
  CHECK(r.body["alpha"] == 0.05);
  CHECK(r.body["bin_weeks"] == kDefaultBinWeeks);
  CHECK(r.body["df"] == 1);
  CHECK(r.body["windows_overlap"] == false);

  auto body = test_body(0);
  body["alpha"] = 0.01;
  body["bin_weeks"] = 4;
  r = post("/api/v1/tests", body);
  CHECK(r.body["alpha"] == 0.01);
  CHECK(r.body["bin_weeks"] == 4);

  body["bin_weeks"] = 5;
  CHECK(post("/api/v1/tests", body).status == 400);
  body = test_body(0);
  body["alpha"] = 1.5;
  CHECK(post("/api/v1/tests", body).status == 400);
  body = test_body(0);
  body["window1"] = {"2020-01-01", "2020-01-10"};
  r = post("/api/v1/tests", body);
  CHECK(r.status == 422);
  CHECK(code_of(r) == "window_too_narrow");
  CHECK(post("/api/v1/tests", test_body(42)).status == 404);
  body = test_body(0);
  body.erase("window2");
  CHECK(post("/api/v1/tests", body).status == 400);
}

TEST_CASE("an all-zero series is degenerate") {
  auto model = std::make_shared<TopicModel>(*synth::small_model().reloaded);
  auto& ts = model->series.at(2);
  std::fill(ts.counts.begin(), ts.counts.begin() + static_cast<std::ptrdiff_t>(ts.bin_count), 0);
  dynamics::refresh_intensity(ts);
  const Api a(model);
  const auto r = a.handle({"POST", "/api/v1/tests", {}, test_body(0).dump()});
  CHECK(r.status == 422);
  CHECK(code_of(r) == "degenerate_ties");
}

TEST_CASE("routing") {
  CHECK(get("/nope").status == 404);
  CHECK(code_of(get("/nope")) == "not_found");
  CHECK(post("/healthz", json::object()).status == 405);
  CHECK(get("/api/v1/tests").status == 405);
  CHECK(get("/api/v1/overlays").status == 200);
}

TEST_CASE("bind addresses") {
  CHECK(parse_bind_addr("0.0.0.0:8080") == std::pair<std::string, int>{"0.0.0.0", 8080});
  CHECK(error_code([] { parse_bind_addr("localhost"); }) == Errc::config_error);
  CHECK(error_code([] { parse_bind_addr("h:70000"); }) == Errc::config_error);
}

TEST_CASE("http front end") {
  ServiceConfig cfg;
  cfg.bind_addr = "127.0.0.1:0";
  cfg.cors_origins = {"http://dash.example"};
  Server server(synth::small_model().reloaded, cfg);
  const int port = server.start();
  REQUIRE(port > 0);
  CHECK(server.port() == port);

  httplib::Client cli("127.0.0.1", port);
  auto res = cli.Get("/healthz", {{"Origin", "http://dash.example"}});
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->get_header_value("Content-Type") == "application/json");
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "http://dash.example");
  CHECK(json::parse(res->body)["status"] == "ok");

  res = cli.Get("/healthz", {{"Origin", "http://elsewhere.example"}});
  REQUIRE(res);
  CHECK_FALSE(res->has_header("Access-Control-Allow-Origin"));

  res = cli.Options("/api/v1/tests");
  REQUIRE(res);
  CHECK(res->status == 204);

  res = cli.Get("/api/v1/topics/search?q=" + synth::small_model().corpus.keywords[0] + "&n=2");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body)["topics"].size() <= 2);

  res = cli.Post("/api/v1/tests", test_body(0).dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);

  res = cli.Get("/missing");
  REQUIRE(res);
  CHECK(res->status == 404);
  CHECK(json::parse(res->body)["error"]["code"] == "not_found");

  ServiceConfig clash = cfg;
  clash.bind_addr = "127.0.0.1:" + std::to_string(port);
  Server second(synth::small_model().reloaded, clash);
  CHECK(error_code([&] { second.bind(); }) == Errc::io_error);
  server.stop();
}
