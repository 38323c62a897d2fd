#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace topictrend::config {

// A run configuration read from a TOML-style file: [section] headers,
// `key = value` lines, strings, integers, floats, booleans and (possibly
// multi-line) arrays. Keys are flattened to dotted paths such as
// "corpus.schema.title".
class Config {
 public:
  // Throws Error(config_error) naming the source and line.
  static Config parse(std::string_view text, const std::string& source = "<config>");
  // Relative paths inside the file resolve against the file's directory.
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  // Throws Error(config_error) "missing config key '<key>'".
  const nlohmann::json& at(const std::string& key) const;
  void set(const std::string& key, nlohmann::json value) { values_[key] = std::move(value); }

  std::string string(const std::string& key) const;
  std::string string_or(const std::string& key, const std::string& fallback) const;
  std::int64_t integer(const std::string& key) const;
  std::int64_t integer_or(const std::string& key, std::int64_t fallback) const;
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  bool boolean_or(const std::string& key, bool fallback) const;
  std::vector<std::string> strings(const std::string& key) const;
  std::vector<std::int64_t> integers(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;

  // A path value resolved against the config file's directory; empty when
  // the key is absent.
  std::filesystem::path path_or_empty(const std::string& key) const;

  // Keys directly below `prefix.` mapped to their values.
  std::map<std::string, nlohmann::json> section(const std::string& prefix) const;

  // FNV-1a over the canonical JSON of all values.
  std::string hash() const;
  nlohmann::json to_json() const;

  const std::filesystem::path& base_dir() const { return base_dir_; }

 private:
  std::map<std::string, nlohmann::json> values_;
  std::filesystem::path base_dir_;
};

}  // namespace topictrend::config
