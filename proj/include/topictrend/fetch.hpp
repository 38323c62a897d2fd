#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace topictrend::ingest {

// Paged HTTP GET against a JSON search endpoint. Each page either is a JSON
// array of records or holds one at `records_pointer`.
struct FetchConfig {
  std::string base_url;  // "http://host[:port]/path"
  std::string query;
  std::string query_param = "q";
  std::string page_param = "s";
  std::size_t page_size = 50;
  std::string page_size_param = "p";
  // "offset": page_param carries the 1-based index of the first record;
  // "index": it carries the 1-based page number.
  std::string page_mode = "offset";
  std::string api_key_env;  // name of the environment variable holding the key
  std::string api_key_param = "api_key";
  std::string records_pointer;  // JSON pointer, empty = response is the array
  std::size_t max_pages = 1000;
};

// Stops at the first empty or short page, or after max_pages. Throws
// Error(io_error) on transport failure or non-200 status, Error(parse_error)
// on a page that is not JSON or lacks the record array.
std::vector<nlohmann::json> fetch_corpus(const FetchConfig& config);

// Request target (path + query string) for one page; exposed for tests.
std::string page_target(const FetchConfig& config, const std::string& path, std::size_t page,
                        const std::string& api_key);

}  // namespace topictrend::ingest
