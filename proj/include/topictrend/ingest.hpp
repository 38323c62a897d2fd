#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "topictrend/csv.hpp"
#include "topictrend/date.hpp"

namespace topictrend::ingest {

// Metadata fields a record can carry. Used for schema mapping, required-field
// filtering and completeness profiles.
enum class Field { record_id, dup_group_key, title, abstract_text, doi, publish_date, journal, authors, language };

inline constexpr Field kAllFields[] = {Field::record_id, Field::dup_group_key, Field::title,
                                       Field::abstract_text, Field::doi, Field::publish_date,
                                       Field::journal, Field::authors, Field::language};

std::string_view field_name(Field f);
std::optional<Field> field_from_name(std::string_view name);

struct CorpusRecord {
  std::string record_id;
  std::string dup_group_key;
  std::optional<std::string> title;
  std::optional<std::string> abstract_text;
  std::optional<std::string> doi;
  std::optional<Date> publish_date;
  std::optional<std::string> journal;
  std::optional<std::vector<std::string>> authors;
  std::optional<std::string> language;

  bool has(Field f) const;
  // Number of optional metadata fields that are present.
  int present_field_count() const;

  friend bool operator==(const CorpusRecord&, const CorpusRecord&) = default;
};

// Filter stages in the fixed order they are applied, plus the dedup stage.
struct Provenance {
  std::size_t raw = 0;
  std::size_t missing_fields = 0;
  std::size_t date_precision = 0;
  std::size_t window = 0;
  std::size_t language = 0;
  std::size_t duplicates = 0;

  std::size_t dropped() const { return missing_fields + date_precision + window + language + duplicates; }
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct CleanCorpus {
  std::vector<CorpusRecord> records;  // ascending publish_date, ties by record_id
  DateRange window;
  Provenance provenance;
};

struct CorpusProfile {
  std::map<std::string, std::size_t> monthly_counts;  // "YYYY-MM" -> count
  std::size_t imprecise = 0;                          // year-precision dates
  std::size_t undated = 0;
  std::map<std::string, double> field_completeness;
  std::map<std::size_t, std::size_t> duplicate_histogram;  // group size -> groups
};

// ---- parsing -------------------------------------------------------------

enum class InputFormat { csv, jsonl };

// Logical field -> column (CSV header name or JSON key).
using Schema = std::map<Field, std::string>;

Schema default_schema();

struct RowError {
  std::size_t line = 0;
  std::string message;
};

struct ParseResult {
  std::vector<CorpusRecord> records;
  std::vector<RowError> skipped;
};

// Throws Error(io_error) when the stream is unreadable, Error(config_error)
// when the schema lacks a mandatory mapping or a mapped CSV column is absent.
ParseResult parse_metadata(std::istream& in, InputFormat format, const Schema& schema);

// ---- filtering -----------------------------------------------------------

struct LanguagePolicy {
  double stopword_threshold = 0.08;
  std::size_t min_tokens = 20;
};

struct FilterOptions {
  std::set<Field> required = {Field::title, Field::abstract_text, Field::publish_date};
  DateRange window;
  LanguagePolicy language;
};

struct FilterResult {
  std::vector<CorpusRecord> records;
  Provenance provenance;
};

// "en" when the text's stopword share exceeds the threshold, the declared tag
// unchanged when one is present, "unknown" otherwise.
std::string detect_language(std::string_view text, const std::optional<std::string>& declared,
                            const LanguagePolicy& policy = {});

bool is_english(std::string_view tag);

FilterResult filter_records(const std::vector<CorpusRecord>& records, const FilterOptions& options);

// One representative per dup_group_key: most present fields, then latest
// publish_date, then smallest record_id. Input order of survivors is kept.
std::vector<CorpusRecord> deduplicate(const std::vector<CorpusRecord>& records);

// filter -> deduplicate -> sort.
CleanCorpus prepare_corpus(const std::vector<CorpusRecord>& raw, const FilterOptions& options);

CorpusProfile profile_corpus(const std::vector<CorpusRecord>& records);

}  // namespace topictrend::ingest
