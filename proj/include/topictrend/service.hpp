#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "topictrend/error.hpp"
#include "topictrend/model.hpp"

namespace topictrend::service {

inline constexpr std::size_t kDefaultResults = 6;
inline constexpr std::size_t kMaxResults = 20;
inline constexpr std::size_t kCardTerms = 50;
inline constexpr int kDefaultBinWeeks = 2;

struct Request {
  std::string method = "GET";
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct Response {
  int status = 200;
  nlohmann::json body;
};

// Every library error code maps to exactly one HTTP status.
int http_status(Errc code);
Response error_response(const Error& e);

// The JSON API, independent of any transport. Handlers only read the model.
class Api {
 public:
  explicit Api(std::shared_ptr<const TopicModel> model);

  Response handle(const Request& request) const;

  Response healthz() const;
  Response model_info() const;
  Response search(const std::map<std::string, std::string>& query) const;
  Response search_embedding(const std::string& body) const;
  Response series(const std::string& topic, const std::map<std::string, std::string>& query) const;
  Response run_test(const std::string& body) const;
  Response overlays() const;

  const TopicModel& model() const { return *model_; }

 private:
  nlohmann::json topic_card(int topic_id, double similarity) const;

  std::shared_ptr<const TopicModel> model_;
};

struct ServiceConfig {
  std::string bind_addr = "127.0.0.1:8080";  // port 0 picks a free port
  std::vector<std::string> cors_origins;     // "*" allows any origin
  std::string static_dir;                    // optional dashboard assets
};

// "host:port" -> (host, port). Throws Error(config_error).
std::pair<std::string, int> parse_bind_addr(const std::string& addr);

// HTTP/1.1 front end over an Api.
class Server {
 public:
  Server(std::shared_ptr<const TopicModel> model, ServiceConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds the socket and returns the port. Throws Error(io_error) when the
  // address cannot be bound.
  int bind();
  // Serves on the bound socket until stop(); bind() first.
  void listen();
  // bind() + listen() on a background thread.
  int start();
  void stop();
  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace topictrend::service
