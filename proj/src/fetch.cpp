#include "topictrend/fetch.hpp"

#include <cctype>
#include <cstdlib>

#include <httplib.h>

#include "topictrend/error.hpp"

namespace topictrend::ingest {

using nlohmann::json;

namespace {

std::string url_encode(const std::string& s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 15]);
    }
  }
  return out;
}

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw Error(Errc::config_error, "fetch base_url lacks a scheme: " + url);
  if (url.compare(0, scheme_end, "http") != 0)
    throw Error(Errc::config_error, "fetch supports plain http only: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

std::string page_target(const FetchConfig& config, const std::string& path, std::size_t page,
                        const std::string& api_key) {
  const std::size_t value =
      config.page_mode == "index" ? page + 1 : page * config.page_size + 1;
  std::string target = path;
  target += path.find('?') == std::string::npos ? '?' : '&';
  target += config.query_param + "=" + url_encode(config.query);
  target += "&" + config.page_param + "=" + std::to_string(value);
  target += "&" + config.page_size_param + "=" + std::to_string(config.page_size);
  if (!api_key.empty()) target += "&" + config.api_key_param + "=" + url_encode(api_key);
  return target;
}

std::vector<json> fetch_corpus(const FetchConfig& config) {
  if (config.page_size == 0) throw Error(Errc::config_error, "fetch page_size must be positive");
  const auto url = split_url(config.base_url);
  std::string api_key;
  if (!config.api_key_env.empty()) {
    const char* v = std::getenv(config.api_key_env.c_str());
    if (!v) throw Error(Errc::config_error, "environment variable " + config.api_key_env + " is not set");
    api_key = v;
  }

  httplib::Client client(url.origin);
  client.set_connection_timeout(10);
  client.set_read_timeout(60);

  std::vector<json> records;
  for (std::size_t page = 0; page < config.max_pages; ++page) {
    auto res = client.Get(page_target(config, url.path, page, api_key));
    if (!res) throw Error(Errc::io_error, "fetch failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
      throw Error(Errc::io_error, "fetch page " + std::to_string(page + 1) + " returned HTTP " +
                                      std::to_string(res->status));
    json body = json::parse(res->body, nullptr, false);
    if (body.is_discarded())
      throw Error(Errc::parse_error, "fetch page " + std::to_string(page + 1) + " is not JSON");
    const json* items = &body;
    if (!config.records_pointer.empty()) {
      json::json_pointer ptr;
      try {
        ptr = json::json_pointer(config.records_pointer);
      } catch (const json::exception&) {
        throw Error(Errc::config_error, "fetch records_pointer is not a JSON pointer: " + config.records_pointer);
      }
      if (!body.contains(ptr))
        throw Error(Errc::parse_error, "fetch page lacks " + config.records_pointer);
      items = &body.at(ptr);
    }
    if (!items->is_array()) throw Error(Errc::parse_error, "fetch page records are not an array");
    for (const auto& item : *items) records.push_back(item);
    if (items->size() < config.page_size) break;
  }
  return records;
}

}  // namespace topictrend::ingest
