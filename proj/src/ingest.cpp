#include "topictrend/ingest.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "topictrend/error.hpp"
#include "topictrend/text.hpp"

namespace topictrend::ingest {

using nlohmann::json;

std::string_view field_name(Field f) {
  switch (f) {
    case Field::record_id: return "record_id";
    case Field::dup_group_key: return "dup_group_key";
    case Field::title: return "title";
    case Field::abstract_text: return "abstract";
    case Field::doi: return "doi";
    case Field::publish_date: return "publish_date";
    case Field::journal: return "journal";
    case Field::authors: return "authors";
    case Field::language: return "language";
  }
  return "";
}

std::optional<Field> field_from_name(std::string_view name) {
  for (Field f : kAllFields) {
    if (field_name(f) == name) return f;
  }
  return std::nullopt;
}

bool CorpusRecord::has(Field f) const {
  switch (f) {
    case Field::record_id: return !record_id.empty();
    case Field::dup_group_key: return !dup_group_key.empty();
    case Field::title: return title.has_value();
    case Field::abstract_text: return abstract_text.has_value();
    case Field::doi: return doi.has_value();
    case Field::publish_date: return publish_date.has_value();
    case Field::journal: return journal.has_value();
    case Field::authors: return authors.has_value();
    case Field::language: return language.has_value();
  }
  return false;
}

int CorpusRecord::present_field_count() const {
  int count = 0;
  for (Field f : kAllFields) {
    if (f != Field::record_id && f != Field::dup_group_key && has(f)) ++count;
  }
  return count;
}

Schema default_schema() {
  Schema s;
  for (Field f : kAllFields) s[f] = std::string(field_name(f));
  return s;
}

namespace {

std::vector<std::string> split_authors(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    auto b = cur.find_first_not_of(" \t");
    auto e = cur.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
    cur.clear();
  };
  for (char c : s) {
    if (c == ';') {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

// Assigns one raw cell to a record field. Returns an error message for an
// unparseable cell, empty otherwise.
std::string assign_field(CorpusRecord& r, Field f, std::optional<std::string> value) {
  if (value && value->empty()) value.reset();
  switch (f) {
    case Field::record_id: r.record_id = value.value_or(""); break;
    case Field::dup_group_key: r.dup_group_key = value.value_or(""); break;
    case Field::title: r.title = std::move(value); break;
    case Field::abstract_text: r.abstract_text = std::move(value); break;
    case Field::doi: r.doi = std::move(value); break;
    case Field::journal: r.journal = std::move(value); break;
    case Field::language: r.language = std::move(value); break;
    case Field::authors:
      if (value) r.authors = split_authors(*value);
      break;
    case Field::publish_date:
      if (value) {
        auto d = parse_date(*value);
        if (!d) return "unparseable publish_date '" + *value + "'";
        r.publish_date = *d;
      }
      break;
  }
  return {};
}

std::string finish_record(CorpusRecord& r) {
  if (r.record_id.empty()) return "empty record_id";
  // Records without a group key form their own group.
  if (r.dup_group_key.empty()) r.dup_group_key = r.record_id;
  return {};
}

void check_schema(const Schema& schema) {
  for (Field f : {Field::record_id, Field::dup_group_key, Field::title, Field::abstract_text,
                  Field::publish_date}) {
    if (!schema.contains(f))
      throw Error(Errc::config_error,
                  "schema is missing a column for '" + std::string(field_name(f)) + "'");
  }
}

ParseResult parse_csv(std::istream& in, const Schema& schema) {
  ParseResult result;
  auto rows = read_csv(in);
  if (rows.empty()) return result;

  const auto& header = rows.front().cells;
  std::vector<std::pair<Field, std::size_t>> columns;
  for (const auto& [field, column] : schema) {
    auto it = std::find(header.begin(), header.end(), column);
    if (it == header.end()) {
      if (field == Field::record_id || field == Field::publish_date)
        throw Error(Errc::config_error, "CSV header lacks mapped column '" + column + "'");
      continue;
    }
    columns.emplace_back(field, static_cast<std::size_t>(it - header.begin()));
  }

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.cells.size() != header.size()) {
      result.skipped.push_back({row.line, "expected " + std::to_string(header.size()) +
                                              " columns, found " +
                                              std::to_string(row.cells.size())});
      continue;
    }
    CorpusRecord rec;
    std::string err;
    for (const auto& [field, col] : columns) {
      err = assign_field(rec, field, row.cells[col]);
      if (!err.empty()) break;
    }
    if (err.empty()) err = finish_record(rec);
    if (!err.empty()) {
      result.skipped.push_back({row.line, err});
      continue;
    }
    result.records.push_back(std::move(rec));
  }
  return result;
}

std::optional<std::string> json_cell(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  if (it->is_array()) {
    std::string joined;
    for (const auto& v : *it) {
      if (!joined.empty()) joined += "; ";
      joined += v.is_string() ? v.get<std::string>() : v.dump();
    }
    return joined;
  }
  return it->dump();
}

ParseResult parse_jsonl(std::istream& in, const Schema& schema) {
  ParseResult result;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      result.skipped.push_back({lineno, "not a JSON object"});
      continue;
    }
    CorpusRecord rec;
    std::string err;
    for (const auto& [field, key] : schema) {
      err = assign_field(rec, field, json_cell(obj, key));
      if (!err.empty()) break;
    }
    if (err.empty()) err = finish_record(rec);
    if (!err.empty()) {
      result.skipped.push_back({lineno, err});
      continue;
    }
    result.records.push_back(std::move(rec));
  }
  if (in.bad()) throw Error(Errc::io_error, "failed reading metadata stream");
  return result;
}

}  // namespace

ParseResult parse_metadata(std::istream& in, InputFormat format, const Schema& schema) {
  if (!in) throw Error(Errc::io_error, "metadata stream is not readable");
  check_schema(schema);
  return format == InputFormat::csv ? parse_csv(in, schema) : parse_jsonl(in, schema);
}

// ---- filtering -----------------------------------------------------------

bool is_english(std::string_view tag) {
  if (tag.size() < 2) return false;
  const bool en = (tag[0] == 'e' || tag[0] == 'E') && (tag[1] == 'n' || tag[1] == 'N');
  return en && (tag.size() == 2 || tag[2] == '-' || tag[2] == '_');
}

std::string detect_language(std::string_view text, const std::optional<std::string>& declared,
                            const LanguagePolicy& policy) {
  if (declared && !declared->empty()) return *declared;
  const auto tokens = text::word_tokens(text);
  if (tokens.empty() || tokens.size() < policy.min_tokens) return "unknown";
  const auto stop = std::count_if(tokens.begin(), tokens.end(),
                                  [](const std::string& t) { return text::is_stopword(t); });
  const double ratio = static_cast<double>(stop) / static_cast<double>(tokens.size());
  return ratio > policy.stopword_threshold ? "en" : "unknown";
}

FilterResult filter_records(const std::vector<CorpusRecord>& records, const FilterOptions& options) {
  FilterResult out;
  out.provenance.raw = records.size();
  for (const auto& r : records) {
    bool missing = false;
    for (Field f : options.required) {
      if (!r.has(f)) {
        missing = true;
        break;
      }
    }
    if (missing) {
      ++out.provenance.missing_fields;
      continue;
    }
    if (!r.publish_date || r.publish_date->precision != DatePrecision::day) {
      ++out.provenance.date_precision;
      continue;
    }
    if (!options.window.contains(*r.publish_date)) {
      ++out.provenance.window;
      continue;
    }
    std::string_view body = r.abstract_text ? std::string_view(*r.abstract_text) : std::string_view();
    if (!is_english(detect_language(body, r.language, options.language))) {
      ++out.provenance.language;
      continue;
    }
    out.records.push_back(r);
  }
  return out;
}

namespace {

// True when `a` is the better representative of its duplicate group.
bool better_representative(const CorpusRecord& a, const CorpusRecord& b) {
  const int ca = a.present_field_count(), cb = b.present_field_count();
  if (ca != cb) return ca > cb;
  if (a.publish_date != b.publish_date) {
    if (!a.publish_date) return false;
    if (!b.publish_date) return true;
    if (a.publish_date->day != b.publish_date->day) return a.publish_date->day > b.publish_date->day;
  }
  return a.record_id < b.record_id;
}

}  // namespace

std::vector<CorpusRecord> deduplicate(const std::vector<CorpusRecord>& records) {
  std::unordered_map<std::string, std::size_t> best;  // key -> index into records
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto [it, inserted] = best.try_emplace(records[i].dup_group_key, i);
    if (!inserted && better_representative(records[i], records[it->second])) it->second = i;
  }
  std::vector<std::size_t> keep;
  keep.reserve(best.size());
  for (const auto& [key, idx] : best) keep.push_back(idx);
  std::sort(keep.begin(), keep.end());
  std::vector<CorpusRecord> out;
  out.reserve(keep.size());
  for (auto idx : keep) out.push_back(records[idx]);
  return out;
}

CleanCorpus prepare_corpus(const std::vector<CorpusRecord>& raw, const FilterOptions& options) {
  auto filtered = filter_records(raw, options);
  CleanCorpus corpus;
  corpus.window = options.window;
  corpus.provenance = filtered.provenance;
  corpus.records = deduplicate(filtered.records);
  corpus.provenance.duplicates = filtered.records.size() - corpus.records.size();
  std::sort(corpus.records.begin(), corpus.records.end(),
            [](const CorpusRecord& a, const CorpusRecord& b) {
              if (a.publish_date->day != b.publish_date->day)
                return a.publish_date->day < b.publish_date->day;
              return a.record_id < b.record_id;
            });
  return corpus;
}

CorpusProfile profile_corpus(const std::vector<CorpusRecord>& records) {
  CorpusProfile p;
  if (records.empty()) return p;

  std::map<std::string, std::size_t> present;
  std::unordered_map<std::string, std::size_t> groups;
  for (const auto& r : records) {
    if (!r.publish_date) {
      ++p.undated;
    } else if (r.publish_date->precision == DatePrecision::year) {
      ++p.imprecise;
    } else {
      Date month_only = *r.publish_date;
      month_only.precision = DatePrecision::month;
      ++p.monthly_counts[month_only.iso()];
    }
    for (Field f : kAllFields) {
      if (r.has(f)) ++present[std::string(field_name(f))];
    }
    ++groups[r.dup_group_key];
  }
  for (Field f : kAllFields) {
    const std::string name(field_name(f));
    p.field_completeness[name] =
        static_cast<double>(present[name]) / static_cast<double>(records.size());
  }
  for (const auto& [key, size] : groups) ++p.duplicate_histogram[size];
  return p;
}

}  // namespace topictrend::ingest
