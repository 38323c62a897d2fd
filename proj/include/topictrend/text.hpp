#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace topictrend::text {

// Lower-cased ASCII word tokens: alphanumeric runs optionally joined by single
// internal hyphens ("sars-cov-2" stays whole, "a--b" splits). Everything
// else, including non-ASCII bytes, separates tokens. Nothing is removed.
std::vector<std::string> word_tokens(std::string_view text);

const std::vector<std::string_view>& stopword_list();
bool is_stopword(std::string_view token);

inline constexpr std::string_view kStopwordListId = "english-v1";
// FNV-1a over the newline-joined list, as 16 hex digits.
std::string stopword_list_hash();

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

}  // namespace topictrend::text
