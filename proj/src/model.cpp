#include "topictrend/model.hpp"

#include <algorithm>

#include "topictrend/error.hpp"

namespace topictrend {

std::size_t TopicModel::outlier_count() const {
  return static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](int l) { return l < 0; }));
}

const dynamics::TopicTimeSeries& TopicModel::series_for(int weeks) const {
  dynamics::check_bin_width(weeks);
  auto it = series.find(weeks);
  if (it == series.end())
    throw Error(Errc::invalid_argument, "no series for bin width " + std::to_string(weeks));
  return it->second;
}

namespace {

double f32(double v) { return static_cast<double>(static_cast<float>(v)); }

void round_all(std::vector<double>& v) {
  for (auto& x : v) x = f32(x);
}

}  // namespace

void quantize(TopicModel& model) {
  round_all(model.projection.mean);
  round_all(model.projection.basis.data());
  round_all(model.projection.explained_variance_ratio);
  round_all(model.topic_centroids.data());
  for (auto& row : model.ctfidf.weights) {
    for (auto& w : row) w.weight = f32(w.weight);
  }
  model.ctfidf.refresh_norms();
}

}  // namespace topictrend
