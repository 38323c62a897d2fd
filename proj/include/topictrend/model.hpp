#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "topictrend/cluster.hpp"
#include "topictrend/date.hpp"
#include "topictrend/dynamics.hpp"
#include "topictrend/reduce.hpp"
#include "topictrend/represent.hpp"

namespace topictrend {

// Everything a fitted run produces; what the artifact stores and the service
// answers from.
struct TopicModel {
  std::string config_hash;
  std::string created;  // ISO-8601 UTC, informational only
  std::uint64_t seed = 0;
  DateRange window;
  cluster::DensityParams params;

  reduce::Projection projection;
  std::vector<std::string> doc_ids;
  std::vector<Date> doc_dates;
  std::vector<int> labels;
  cluster::CondensedTree tree;
  represent::ClassTfIdfModel ctfidf;
  std::vector<std::int64_t> topic_sizes;
  Matrix topic_centroids;  // topics x embedding dim
  std::map<int, dynamics::TopicTimeSeries> series;  // keyed by bin width in weeks
  dynamics::OverlaySeries overlays;

  std::size_t topic_count() const { return topic_sizes.size(); }
  std::size_t document_count() const { return labels.size(); }
  std::size_t outlier_count() const;

  // Throws Error(invalid_argument) for a width without a series.
  const dynamics::TopicTimeSeries& series_for(int weeks) const;
};

// Rounds every value the artifact keeps as float32 through float32, so an
// in-memory model answers queries exactly like its reloaded copy.
void quantize(TopicModel& model);

}  // namespace topictrend
