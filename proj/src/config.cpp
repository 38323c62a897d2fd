#include "topictrend/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <cmath>
#include <fstream>
#include <sstream>

#include "topictrend/date.hpp"
#include "topictrend/error.hpp"
#include "topictrend/text.hpp"

namespace topictrend::config {

using nlohmann::json;

namespace {

class Parser {
 public:
  Parser(std::string_view text, std::string source) : s_(text), source_(std::move(source)) {}

  std::map<std::string, json> run() {
    std::map<std::string, json> out;
    std::string section;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        skip_inline_space();
        section = dotted_key();
        skip_inline_space();
        expect(']');
        end_of_line();
        continue;
      }
      const std::string key = dotted_key();
      const std::string full = section.empty() ? key : section + "." + key;
      const std::size_t key_line = line_;
      skip_inline_space();
      expect('=');
      skip_inline_space();
      json v = value();
      end_of_line();
      if (out.count(full)) fail("duplicate key '" + full + "'", key_line);
      out[full] = std::move(v);
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what, std::size_t line = 0) const {
    throw Error(Errc::config_error, source_ + ":" + std::to_string(line ? line : line_) + ": " + what);
  }

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_inline_space() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
  }

  // Whitespace, comments and newlines (inside arrays and between entries).
  void skip_blank_lines() {
    while (!eof()) {
      skip_inline_space();
      skip_comment();
      if (peek() == '\r') ++pos_;
      if (peek() == '\n') {
        ++pos_;
        ++line_;
        continue;
      }
      break;
    }
  }

  void end_of_line() {
    skip_inline_space();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (eof()) return;
    if (peek() != '\n') fail("unexpected text after value");
    ++pos_;
    ++line_;
  }

  static bool bare_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }

  std::string key_part() {
    if (peek() == '"') return basic_string();
    std::string k;
    while (!eof() && bare_char(peek())) k += s_[pos_++];
    if (k.empty()) fail("expected a key");
    return k;
  }

  std::string dotted_key() {
    std::string k = key_part();
    skip_inline_space();
    while (peek() == '.') {
      ++pos_;
      skip_inline_space();
      k += "." + key_part();
      skip_inline_space();
    }
    return k;
  }

  std::string basic_string() {
    expect('"');
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = s_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (eof()) fail("unterminated escape");
      c = s_[pos_++];
      switch (c) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: fail(std::string("unsupported escape \\") + c);
      }
    }
    return out;
  }

  std::string literal_string() {
    expect('\'');
    std::string out;
    while (peek() != '\'') {
      if (eof() || peek() == '\n') fail("unterminated string");
      out += s_[pos_++];
    }
    ++pos_;
    return out;
  }

  json value() {
    const char c = peek();
    if (c == '"') return basic_string();
    if (c == '\'') return literal_string();
    if (c == '[') return array();
    std::string word;
    while (!eof() && (bare_char(peek()) || peek() == '.' || peek() == '+')) word += s_[pos_++];
    if (word == "true") return true;
    if (word == "false") return false;
    if (word.empty()) fail("expected a value");
    // Bare TOML dates are kept as their ISO text.
    if (word.find('-', 1) != std::string::npos && parse_day(word)) return word;
    std::string digits;
    for (char ch : word) {
      if (ch != '_') digits += ch;
    }
    const bool floating = digits.find_first_of(".eE") != std::string::npos || digits == "inf" ||
                          digits == "+inf" || digits == "-inf" || digits == "nan";
    char* end = nullptr;
    if (!floating) {
      errno = 0;
      const long long v = std::strtoll(digits.c_str(), &end, 10);
      if (end == digits.c_str() + digits.size() && errno == 0) return static_cast<std::int64_t>(v);
    } else {
      const double v = std::strtod(digits.c_str(), &end);
      if (end == digits.c_str() + digits.size() && std::isfinite(v)) return v;
    }
    fail("cannot read value '" + word + "'");
  }

  json array() {
    expect('[');
    json out = json::array();
    while (true) {
      skip_blank_lines();
      if (peek() == ']') {
        ++pos_;
        return out;
      }
      out.push_back(value());
      skip_blank_lines();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() != ']') fail("expected ',' or ']' in array");
    }
  }

  std::string_view s_;
  std::string source_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

[[noreturn]] void wrong_type(const std::string& key, const char* expected) {
  throw Error(Errc::config_error, "config key '" + key + "' must be " + expected);
}

}  // namespace

Config Config::parse(std::string_view text, const std::string& source) {
  Config c;
  c.values_ = Parser(text, source).run();
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::config_error, "cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  Config c = parse(ss.str(), path.string());
  c.base_dir_ = std::filesystem::absolute(path).parent_path();
  return c;
}

const json& Config::at(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(Errc::config_error, "missing config key '" + key + "'");
  return it->second;
}

std::string Config::string(const std::string& key) const {
  const auto& v = at(key);
  if (!v.is_string()) wrong_type(key, "a string");
  return v.get<std::string>();
}

std::string Config::string_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? string(key) : fallback;
}

std::int64_t Config::integer(const std::string& key) const {
  const auto& v = at(key);
  if (!v.is_number_integer()) wrong_type(key, "an integer");
  return v.get<std::int64_t>();
}

std::int64_t Config::integer_or(const std::string& key, std::int64_t fallback) const {
  return has(key) ? integer(key) : fallback;
}

double Config::number(const std::string& key) const {
  const auto& v = at(key);
  if (!v.is_number()) wrong_type(key, "a number");
  return v.get<double>();
}

double Config::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

bool Config::boolean_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto& v = at(key);
  if (!v.is_boolean()) wrong_type(key, "true or false");
  return v.get<bool>();
}

std::vector<std::string> Config::strings(const std::string& key) const {
  const auto& v = at(key);
  if (v.is_string()) return {v.get<std::string>()};
  if (!v.is_array()) wrong_type(key, "an array of strings");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) wrong_type(key, "an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::vector<std::int64_t> Config::integers(const std::string& key) const {
  const auto& v = at(key);
  if (v.is_number_integer()) return {v.get<std::int64_t>()};
  if (!v.is_array()) wrong_type(key, "an array of integers");
  std::vector<std::int64_t> out;
  for (const auto& e : v) {
    if (!e.is_number_integer()) wrong_type(key, "an array of integers");
    out.push_back(e.get<std::int64_t>());
  }
  return out;
}

std::vector<double> Config::numbers(const std::string& key) const {
  const auto& v = at(key);
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) wrong_type(key, "an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) wrong_type(key, "an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::filesystem::path Config::path_or_empty(const std::string& key) const {
  if (!has(key)) return {};
  std::filesystem::path p = string(key);
  if (p.empty() || p.is_absolute() || base_dir_.empty()) return p;
  return base_dir_ / p;
}

std::map<std::string, json> Config::section(const std::string& prefix) const {
  std::map<std::string, json> out;
  const std::string head = prefix + ".";
  for (auto it = values_.lower_bound(head); it != values_.end() && it->first.rfind(head, 0) == 0; ++it) {
    const std::string rest = it->first.substr(head.size());
    if (rest.find('.') == std::string::npos) out[rest] = it->second;
  }
  return out;
}

json Config::to_json() const {
  json out = json::object();
  for (const auto& [k, v] : values_) out[k] = v;
  return out;
}

std::string Config::hash() const { return text::hex64(text::fnv1a64(to_json().dump())); }

}  // namespace topictrend::config
