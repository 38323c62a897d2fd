#include "topictrend/corpus_io.hpp"

#include <fstream>

#include "topictrend/error.hpp"

namespace topictrend::ingest {

using nlohmann::json;

namespace {

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<std::string> opt_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

}  // namespace

json to_json(const CorpusRecord& r) {
  return {{"record_id", r.record_id},
          {"dup_group_key", r.dup_group_key},
          {"title", opt(r.title)},
          {"abstract", opt(r.abstract_text)},
          {"doi", opt(r.doi)},
          {"publish_date", r.publish_date ? json(r.publish_date->iso()) : json(nullptr)},
          {"journal", opt(r.journal)},
          {"authors", opt(r.authors)},
          {"language", opt(r.language)}};
}

CorpusRecord record_from_json(const json& j) {
  CorpusRecord r;
  r.record_id = j.at("record_id").get<std::string>();
  r.dup_group_key = j.value("dup_group_key", r.record_id);
  r.title = opt_string(j, "title");
  r.abstract_text = opt_string(j, "abstract");
  r.doi = opt_string(j, "doi");
  r.journal = opt_string(j, "journal");
  r.language = opt_string(j, "language");
  if (auto a = j.find("authors"); a != j.end() && !a->is_null())
    r.authors = a->get<std::vector<std::string>>();
  if (auto d = opt_string(j, "publish_date")) {
    auto parsed = parse_date(*d);
    if (!parsed) throw Error(Errc::parse_error, "bad publish_date '" + *d + "'");
    r.publish_date = *parsed;
  }
  return r;
}

json to_json(const Provenance& p) {
  return {{"raw", p.raw},
          {"dropped",
           {{"missing_fields", p.missing_fields},
            {"date_precision", p.date_precision},
            {"window", p.window},
            {"language", p.language},
            {"duplicates", p.duplicates}}}};
}

json to_json(const CorpusProfile& p) {
  json hist = json::object();
  for (const auto& [size, groups] : p.duplicate_histogram) hist[std::to_string(size)] = groups;
  return {{"monthly_counts", p.monthly_counts},
          {"imprecise", p.imprecise},
          {"undated", p.undated},
          {"field_completeness", p.field_completeness},
          {"duplicate_histogram", hist}};
}

void write_clean_corpus(const std::filesystem::path& dir, const CleanCorpus& corpus,
                        const CorpusProfile& profile, std::size_t skipped_rows) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "corpus.jsonl", std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot write " + (dir / "corpus.jsonl").string());
    for (const auto& r : corpus.records) out << to_json(r).dump() << '\n';
  }
  json prov = to_json(corpus.provenance);
  prov["kept"] = corpus.records.size();
  prov["skipped_rows"] = skipped_rows;
  prov["window"] = {corpus.window.start.iso_day(), corpus.window.end.iso_day()};
  std::ofstream(dir / "provenance.json", std::ios::binary) << prov.dump(2) << '\n';
  std::ofstream(dir / "profile.json", std::ios::binary) << to_json(profile).dump(2) << '\n';
}

CleanCorpus read_clean_corpus(const std::filesystem::path& dir) {
  std::ifstream prov_in(dir / "provenance.json");
  std::ifstream corpus_in(dir / "corpus.jsonl");
  if (!prov_in || !corpus_in)
    throw Error(Errc::io_error, "not a prepared corpus directory: " + dir.string());

  CleanCorpus corpus;
  json prov = json::parse(prov_in, nullptr, false);
  if (prov.is_discarded()) throw Error(Errc::parse_error, "provenance.json is not valid JSON");
  auto start = parse_day(prov.at("window").at(0).get<std::string>());
  auto end = parse_day(prov.at("window").at(1).get<std::string>());
  if (!start || !end) throw Error(Errc::parse_error, "provenance.json has a bad window");
  corpus.window = {*start, *end};
  const auto& dropped = prov.at("dropped");
  corpus.provenance.raw = prov.at("raw");
  corpus.provenance.missing_fields = dropped.at("missing_fields");
  corpus.provenance.date_precision = dropped.at("date_precision");
  corpus.provenance.window = dropped.at("window");
  corpus.provenance.language = dropped.at("language");
  corpus.provenance.duplicates = dropped.at("duplicates");

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(corpus_in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw Error(Errc::parse_error, "corpus.jsonl line " + std::to_string(lineno) + " is not JSON");
    corpus.records.push_back(record_from_json(j));
  }
  return corpus;
}

}  // namespace topictrend::ingest
