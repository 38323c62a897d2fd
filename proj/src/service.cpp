#include "topictrend/service.hpp"

#include <algorithm>
#include <charconv>
#include <optional>
#include <thread>

#include <httplib.h>

#include "topictrend/dynamics.hpp"
#include "topictrend/persistence.hpp"
#include "topictrend/represent.hpp"
#include "topictrend/stats.hpp"

namespace topictrend::service {

using nlohmann::json;

int http_status(Errc code) {
  switch (code) {
    case Errc::topic_not_found:
      return 404;
    case Errc::window_too_narrow:
    case Errc::degenerate_ties:
    case Errc::empty_group:
    case Errc::no_bins_in_interval:
      return 422;
    case Errc::invalid_argument:
    case Errc::parse_error:
    case Errc::no_searchable_terms:
    case Errc::dimension_mismatch:
    case Errc::date_before_origin:
    case Errc::non_finite:
      return 400;
    default:
      return 500;
  }
}

Response error_response(const Error& e) {
  const int status = http_status(e.code());
  return {status, {{"status", status}, {"error", {{"code", e.name()}, {"message", e.what()}}}}};
}

namespace {

Response plain_error(int status, const std::string& code, const std::string& message) {
  return {status, {{"status", status}, {"error", {{"code", code}, {"message", message}}}}};
}

std::optional<long long> parse_int(const std::string& s) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || s.empty()) return std::nullopt;
  return v;
}

int bin_weeks_param(const std::map<std::string, std::string>& q) {
  auto it = q.find("bin_weeks");
  if (it == q.end()) return kDefaultBinWeeks;
  const auto v = parse_int(it->second);
  if (!v || *v < dynamics::kMinBinWeeks || *v > dynamics::kMaxBinWeeks)
    throw Error(Errc::invalid_argument, "bin_weeks must be one of 1, 2, 3, 4");
  return static_cast<int>(*v);
}

Date day_param(const std::string& name, const std::string& value) {
  const auto d = parse_day(value);
  if (!d) throw Error(Errc::invalid_argument, name + " must be an ISO date (YYYY-MM-DD), got '" + value + "'");
  return *d;
}

DateRange window_field(const json& body, const char* name) {
  if (!body.contains(name) || !body[name].is_array() || body[name].size() != 2 || !body[name][0].is_string() ||
      !body[name][1].is_string())
    throw Error(Errc::invalid_argument, std::string(name) + " must be [start, end] ISO dates");
  DateRange r{day_param(name, body[name][0].get<std::string>()), day_param(name, body[name][1].get<std::string>())};
  if (r.end.day < r.start.day) throw Error(Errc::invalid_argument, std::string(name) + " ends before it starts");
  return r;
}

json parse_body(const std::string& body) {
  try {
    json j = json::parse(body);
    if (!j.is_object()) throw Error(Errc::invalid_argument, "request body must be a JSON object");
    return j;
  } catch (const json::parse_error&) {
    throw Error(Errc::invalid_argument, "request body is not valid JSON");
  }
}

}  // namespace

Api::Api(std::shared_ptr<const TopicModel> model) : model_(std::move(model)) {}

Response Api::healthz() const { return {200, {{"status", "ok"}, {"topics", model_->topic_count()}}}; }

Response Api::model_info() const {
  const auto& m = *model_;
  json widths = json::array();
  for (const auto& [w, ts] : m.series) widths.push_back(w);
  return {200,
          {{"format_version", persistence::kFormatVersion},
           {"created", m.created},
           {"config_hash", m.config_hash},
           {"seed", m.seed},
           {"counts",
            {{"documents", m.document_count()},
             {"topics", m.topic_count()},
             {"outliers", m.outlier_count()},
             {"vocabulary", m.ctfidf.vocabulary.size()},
             {"embedding_dim", m.projection.input_dim()},
             {"components", m.projection.components()}}},
           {"window", {{"start", m.window.start.iso_day()}, {"end", m.window.end.iso_day()}}},
           {"bin_weeks", widths},
           {"params",
            {{"min_cluster_size", m.params.min_cluster_size},
             {"min_samples", m.params.min_samples},
             {"metric", cluster::to_string(m.params.metric)},
             {"selection", cluster::to_string(m.params.selection)}}}}};
}

json Api::topic_card(int topic_id, double similarity) const {
  json terms = json::array();
  for (const auto& t : represent::top_terms(model_->ctfidf, topic_id, kCardTerms))
    terms.push_back({{"term", t.term}, {"weight", t.weight}});
  return {{"topic_id", topic_id},
          {"size", model_->topic_sizes[static_cast<std::size_t>(topic_id)]},
          {"similarity", similarity},
          {"terms", terms}};
}

namespace {

std::size_t result_count(const std::map<std::string, std::string>& q) {
  auto it = q.find("n");
  if (it == q.end()) return kDefaultResults;
  const auto v = parse_int(it->second);
  if (!v || *v < 1) throw Error(Errc::invalid_argument, "n must be a positive integer");
  return std::min<std::size_t>(static_cast<std::size_t>(*v), kMaxResults);
}

}  // namespace

Response Api::search(const std::map<std::string, std::string>& query) const {
  const auto it = query.find("q");
  const std::string q = it == query.end() ? "" : it->second;
  const std::size_t n = result_count(query);
  const auto res = represent::search_topics(model_->ctfidf, q, n);
  json topics = json::array();
  for (const auto& hit : res.hits) topics.push_back(topic_card(hit.topic_id, hit.similarity));
  return {200,
          {{"query", q},
           {"n", n},
           {"status", res.status == represent::SearchStatus::ok ? "ok" : "no_match"},
           {"unknown_terms", res.unknown},
           {"topics", topics}}};
}

Response Api::search_embedding(const std::string& body) const {
  const json j = parse_body(body);
  if (!j.contains("vector") || !j["vector"].is_array())
    throw Error(Errc::invalid_argument, "body must hold a numeric 'vector'");
  std::vector<double> v;
  for (const auto& x : j["vector"]) {
    if (!x.is_number()) throw Error(Errc::invalid_argument, "'vector' must hold numbers only");
    v.push_back(x.get<double>());
  }
  std::size_t n = kDefaultResults;
  if (j.contains("n")) {
    if (!j["n"].is_number_integer() || j["n"].get<long long>() < 1)
      throw Error(Errc::invalid_argument, "n must be a positive integer");
    n = std::min<std::size_t>(j["n"].get<std::size_t>(), kMaxResults);
  }
  json topics = json::array();
  for (const auto& hit : represent::search_by_embedding(model_->topic_centroids, v, n))
    topics.push_back(topic_card(hit.topic_id, hit.similarity));
  return {200, {{"n", n}, {"status", topics.empty() ? "no_match" : "ok"}, {"topics", topics}}};
}

Response Api::series(const std::string& topic, const std::map<std::string, std::string>& query) const {
  const auto id = parse_int(topic);
  if (!id || *id < 0 || *id >= static_cast<long long>(model_->topic_count()))
    throw Error(Errc::topic_not_found, "topic " + topic + " does not exist");
  const int weeks = bin_weeks_param(query);
  DateRange range = model_->window;
  if (auto it = query.find("from"); it != query.end()) range.start = day_param("from", it->second);
  if (auto it = query.find("to"); it != query.end()) range.end = day_param("to", it->second);
  const int ids[] = {static_cast<int>(*id)};
  const auto& ts = model_->series_for(weeks);
  const auto series = dynamics::series_for_topics(ts, ids, range);
  json points = json::array();
  for (const auto& p : series.front().points)
    points.push_back({{"bin_start", p.bin_start.iso_day()}, {"count", p.count}, {"intensity", p.intensity}});
  return {200,
          {{"topic_id", *id},
           {"bin_weeks", weeks},
           {"from", range.start.iso_day()},
           {"to", range.end.iso_day()},
           {"points", points},
           {"overlays", persistence::overlays_to_json(dynamics::slice_overlays(model_->overlays, range))}}};
}

Response Api::run_test(const std::string& body) const {
  const json j = parse_body(body);
  if (!j.contains("topic_id") || !j["topic_id"].is_number_integer())
    throw Error(Errc::invalid_argument, "topic_id must be an integer");
  const auto topic = j["topic_id"].get<long long>();
  if (topic < 0 || topic >= static_cast<long long>(model_->topic_count()))
    throw Error(Errc::topic_not_found, "topic " + std::to_string(topic) + " does not exist");
  int weeks = kDefaultBinWeeks;
  if (j.contains("bin_weeks")) {
    if (!j["bin_weeks"].is_number_integer()) throw Error(Errc::invalid_argument, "bin_weeks must be one of 1, 2, 3, 4");
    weeks = j["bin_weeks"].get<int>();
    if (weeks < dynamics::kMinBinWeeks || weeks > dynamics::kMaxBinWeeks)
      throw Error(Errc::invalid_argument, "bin_weeks must be one of 1, 2, 3, 4");
  }
  double alpha = 0.05;
  if (j.contains("alpha") && !j["alpha"].is_null()) {
    if (!j["alpha"].is_number()) throw Error(Errc::invalid_argument, "alpha must be a number");
    alpha = j["alpha"].get<double>();
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::invalid_argument, "alpha must lie in (0, 1)");
  }
  const DateRange w1 = window_field(j, "window1"), w2 = window_field(j, "window2");
  const auto r = stats::test_topic_windows(model_->series_for(weeks), static_cast<int>(topic), w1, w2, alpha);
  return {200,
          {{"topic_id", topic},
           {"bin_weeks", weeks},
           {"alpha", alpha},
           {"window1", {w1.start.iso_day(), w1.end.iso_day()}},
           {"window2", {w2.start.iso_day(), w2.end.iso_day()}},
           {"h", r.h},
           {"df", r.df},
           {"p", r.p},
           {"significant", r.significant},
           {"group_sizes", r.group_sizes},
           {"rank_sums", r.rank_sums},
           {"tie_correction", r.tie_correction},
           {"windows_overlap", r.windows_overlap}}};
}

Response Api::overlays() const { return {200, persistence::overlays_to_json(model_->overlays)}; }

Response Api::handle(const Request& req) const {
  static const std::string kTopics = "/api/v1/topics/";
  try {
    const std::string& p = req.path;
    const bool get = req.method == "GET", post = req.method == "POST";
    auto only = [&](bool ok, auto&& fn) -> Response {
      if (!ok) return plain_error(405, "method_not_allowed", req.method + " is not allowed on " + p);
      return fn();
    };
    if (p == "/healthz") return only(get, [&] { return healthz(); });
    if (p == "/api/v1/model") return only(get, [&] { return model_info(); });
    if (p == "/api/v1/overlays") return only(get, [&] { return overlays(); });
    if (p == "/api/v1/tests") return only(post, [&] { return run_test(req.body); });
    if (p == "/api/v1/topics/search") return only(get, [&] { return search(req.query); });
    if (p == "/api/v1/topics/search_by_embedding") return only(post, [&] { return search_embedding(req.body); });
    if (p.rfind(kTopics, 0) == 0 && p.size() > kTopics.size() + 7 && p.ends_with("/series")) {
      const std::string id = p.substr(kTopics.size(), p.size() - kTopics.size() - 7);
      if (id.find('/') == std::string::npos) return only(get, [&] { return series(id, req.query); });
    }
    return plain_error(404, "not_found", "no such endpoint: " + p);
  } catch (const Error& e) {
    return error_response(e);
  } catch (const std::exception& e) {
    return plain_error(500, "internal", e.what());
  }
}

std::pair<std::string, int> parse_bind_addr(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos || colon == 0)
    throw Error(Errc::config_error, "bind address must look like host:port, got '" + addr + "'");
  const auto port = parse_int(addr.substr(colon + 1));
  if (!port || *port < 0 || *port > 65535) throw Error(Errc::config_error, "bad port in bind address '" + addr + "'");
  return {addr.substr(0, colon), static_cast<int>(*port)};
}

struct Server::Impl {
  Api api;
  ServiceConfig config;
  httplib::Server http;
  std::thread thread;
  int port = -1;

  Impl(std::shared_ptr<const TopicModel> model, ServiceConfig cfg) : api(std::move(model)), config(std::move(cfg)) {}

  std::string allowed_origin(const httplib::Request& req) const {
    const std::string origin = req.get_header_value("Origin");
    for (const auto& o : config.cors_origins) {
      if (o == "*") return "*";
      if (!origin.empty() && o == origin) return origin;
    }
    return {};
  }

  void install() {
    auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
      Request r{req.method, req.path, {}, req.body};
      for (const auto& [k, v] : req.params) r.query.emplace(k, v);
      const Response out = api.handle(r);
      res.status = out.status;
      res.set_content(out.body.dump(), "application/json");
    };
    // Small JSON replies; without this, delayed ACKs add ~40 ms per request.
    http.set_tcp_nodelay(true);
    // httplib's default adds SO_REUSEPORT, which lets a second server share a
    // busy port instead of failing to bind.
    http.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
    });
    http.Get(".*", dispatch);
    http.Post(".*", dispatch);
    http.Options(".*", [](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
    http.set_post_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
      const std::string origin = allowed_origin(req);
      if (!origin.empty()) {
        res.set_header("Access-Control-Allow-Origin", origin);
        if (origin != "*") res.set_header("Vary", "Origin");
      }
    });
    if (!config.static_dir.empty() && !http.set_mount_point("/", config.static_dir))
      throw Error(Errc::io_error, "static directory not found: " + config.static_dir);
  }
};

Server::Server(std::shared_ptr<const TopicModel> model, ServiceConfig config)
    : impl_(std::make_unique<Impl>(std::move(model), std::move(config))) {
  impl_->install();
}

Server::~Server() { stop(); }

int Server::bind() {
  const auto [host, port] = parse_bind_addr(impl_->config.bind_addr);
  if (port == 0) {
    impl_->port = impl_->http.bind_to_any_port(host);
  } else {
    impl_->port = impl_->http.bind_to_port(host, port) ? port : -1;
  }
  if (impl_->port < 0)
    throw Error(Errc::io_error, "cannot bind " + impl_->config.bind_addr + " (address in use or not available)");
  return impl_->port;
}

void Server::listen() { impl_->http.listen_after_bind(); }

int Server::start() {
  const int p = bind();
  impl_->thread = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
  return p;
}

void Server::stop() {
  if (!impl_) return;
  impl_->http.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int Server::port() const { return impl_->port; }

}  // namespace topictrend::service
