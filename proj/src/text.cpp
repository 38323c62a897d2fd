#include "topictrend/text.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_set>

namespace topictrend::text {

namespace {

bool is_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

}  // namespace

std::vector<std::string> word_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    if (!is_alnum(text[i])) {
      ++i;
      continue;
    }
    std::string tok;
    while (true) {
      while (i < n && is_alnum(text[i])) tok.push_back(lower(text[i++]));
      // A single hyphen followed by another alphanumeric run continues the token.
      if (i + 1 < n && text[i] == '-' && is_alnum(text[i + 1])) {
        tok.push_back('-');
        ++i;
        continue;
      }
      break;
    }
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

bool is_stopword(std::string_view token) {
  static const std::unordered_set<std::string_view> set(stopword_list().begin(),
                                                        stopword_list().end());
  return set.contains(token);
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string stopword_list_hash() {
  std::string joined;
  for (auto w : stopword_list()) {
    joined.append(w);
    joined.push_back('\n');
  }
  return hex64(fnv1a64(joined));
}

}  // namespace topictrend::text
