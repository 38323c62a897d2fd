#include <doctest.h>

#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "topictrend/error.hpp"
#include "topictrend/fetch.hpp"

using namespace topictrend;
using namespace topictrend::ingest;
using nlohmann::json;

namespace {

// Serves `total` records, paged by s (1-based offset) and p (page size).
struct FakeApi {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::mutex mu;
  std::vector<std::string> targets;

  explicit FakeApi(int total, bool wrapped = false) {
    server.Get("/search", [this, total, wrapped](const httplib::Request& req, httplib::Response& res) {
      {
        std::lock_guard lock(mu);
        targets.push_back(req.target);
      }
      if (req.get_param_value("api_key") == "bad") {
        res.status = 403;
        return;
      }
      const int start = std::stoi(req.get_param_value("s"));
      const int size = std::stoi(req.get_param_value("p"));
      json page = json::array();
      for (int i = start; i < start + size && i <= total; ++i)
        page.push_back({{"id", i}, {"q", req.get_param_value("q")}});
      res.set_content((wrapped ? json{{"data", {{"items", page}}}} : page).dump(), "application/json");
    });
    server.Get("/broken", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("<html>", "text/html");
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~FakeApi() {
    server.stop();
    thread.join();
  }
  std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port) + path; }
};

}  // namespace

TEST_CASE("page_target encodes the query and paging parameters") {
  FetchConfig c;
  c.query = "covid 19&more";
  c.page_size = 25;
  CHECK(page_target(c, "/api", 0, "") == "/api?q=covid%2019%26more&s=1&p=25");
  CHECK(page_target(c, "/api", 2, "k y") == "/api?q=covid%2019%26more&s=51&p=25&api_key=k%20y");
  c.page_mode = "index";
  CHECK(page_target(c, "/api?x=1", 2, "") == "/api?x=1&q=covid%2019%26more&s=3&p=25");
}

TEST_CASE("fetch walks pages until a short page") {
  FakeApi api(23);
  FetchConfig c;
  c.base_url = api.url("/search");
  c.query = "sars";
  c.page_size = 10;
  const auto records = fetch_corpus(c);
  REQUIRE(records.size() == 23);
  CHECK(records.front()["id"] == 1);
  CHECK(records.back()["id"] == 23);
  CHECK(records[5]["q"] == "sars");
  CHECK(api.targets.size() == 3);
}

TEST_CASE("fetch stops after an empty page and respects max_pages") {
  FakeApi api(20);
  FetchConfig c;
  c.base_url = api.url("/search");
  c.query = "x";
  c.page_size = 10;
  CHECK(fetch_corpus(c).size() == 20);
  CHECK(api.targets.size() == 3);
  c.max_pages = 1;
  CHECK(fetch_corpus(c).size() == 10);
}

TEST_CASE("fetch reads records below a JSON pointer and passes the api key") {
  FakeApi api(5, true);
  ::setenv("TOPICTREND_TEST_KEY", "s3cret", 1);
  FetchConfig c;
  c.base_url = api.url("/search");
  c.query = "x";
  c.records_pointer = "/data/items";
  c.api_key_env = "TOPICTREND_TEST_KEY";
  CHECK(fetch_corpus(c).size() == 5);
  CHECK(api.targets[0].find("api_key=s3cret") != std::string::npos);
}

TEST_CASE("fetch failures map to error codes") {
  FakeApi api(5);
  FetchConfig c;
  c.query = "x";

  c.base_url = api.url("/broken");
  try {
    fetch_corpus(c);
    FAIL("expected parse_error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::parse_error);
  }

  c.base_url = api.url("/missing");
  try {
    fetch_corpus(c);
    FAIL("expected io_error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::io_error);
    CHECK(std::string(e.what()).find("404") != std::string::npos);
  }

  ::setenv("TOPICTREND_BAD_KEY", "bad", 1);
  c.base_url = api.url("/search");
  c.api_key_env = "TOPICTREND_BAD_KEY";
  CHECK_THROWS_AS(fetch_corpus(c), Error);

  c.api_key_env = "TOPICTREND_UNSET_VARIABLE";
  try {
    fetch_corpus(c);
    FAIL("expected config_error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::config_error);
  }

  c.api_key_env.clear();
  c.base_url = "ftp://example.org/x";
  CHECK_THROWS_AS(fetch_corpus(c), Error);

  c.base_url = "http://127.0.0.1:1/none";
  try {
    fetch_corpus(c);
    FAIL("expected io_error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::io_error);
  }
}
