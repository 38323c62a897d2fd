#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "topictrend/cluster.hpp"
#include "topictrend/matrix.hpp"

namespace topictrend::tune {

// One value list per tuned parameter. Combinations are enumerated with the
// parameter names in lexicographic order (k, metric, min_cluster_size,
// min_samples, selection), the last name varying fastest, each list in the
// order given.
struct Grid {
  std::vector<std::size_t> k{50};
  std::vector<Metric> metric{Metric::euclidean};
  std::vector<int> min_cluster_size{100};
  std::vector<int> min_samples{10};
  std::vector<cluster::Selection> selection{cluster::Selection::leaf};

  std::size_t combinations() const;
};

struct TrialParams {
  std::size_t k = 50;
  cluster::DensityParams density;
  friend bool operator==(const TrialParams&, const TrialParams&) = default;
};

std::vector<TrialParams> enumerate(const Grid& grid);

struct TrialResult {
  std::size_t index = 0;
  TrialParams params;
  std::optional<double> dbcv;  // empty when undefined
  int clusters = 0;
  double outlier_fraction = 0.0;
  std::uint64_t seed = 0;
  double ms = 0.0;
  std::string note;  // why dbcv is undefined
};

struct TuneResult {
  std::size_t best = 0;  // index into trials
  std::vector<TrialResult> trials;

  const TrialResult& best_trial() const { return trials[best]; }
};

struct TuneOptions {
  double subsample_fraction = 0.25;
  std::uint64_t base_seed = 0;
  bool parallel_trials = true;
};

// Trial i clusters the PCA-reduced subsample drawn with seed base_seed + i
// and scores it with DBCV. Undefined scores rank below every defined one,
// ties go to the earlier trial. Throws Error(no_valid_configuration) when no
// trial has a defined score.
TuneResult grid_search(const Matrix& embeddings, const Grid& grid, const TuneOptions& options);

// Runs a single trial; exposed so a reported best run can be replayed.
TrialResult run_trial(const Matrix& embeddings, const TrialParams& params, double fraction,
                      std::uint64_t seed);

// `trial,k,metric,min_cluster_size,min_samples,selection,dbcv,clusters,outlier_fraction,seed,ms`
std::string trials_csv(const TuneResult& result);

}  // namespace topictrend::tune
