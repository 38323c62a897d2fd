#pragma once

#include <filesystem>

#include <json.hpp>

#include "topictrend/ingest.hpp"

namespace topictrend::ingest {

nlohmann::json to_json(const CorpusRecord& r);
CorpusRecord record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Provenance& p);
nlohmann::json to_json(const CorpusProfile& p);

// A prepared corpus directory holds corpus.jsonl, provenance.json (with the
// window) and profile.json.
void write_clean_corpus(const std::filesystem::path& dir, const CleanCorpus& corpus,
                        const CorpusProfile& profile, std::size_t skipped_rows);
CleanCorpus read_clean_corpus(const std::filesystem::path& dir);

}  // namespace topictrend::ingest
