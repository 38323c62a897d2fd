#include "topictrend/tune.hpp"

#include <chrono>
#include <cstdio>
#include <exception>
#include <sstream>

#include "topictrend/embedstore.hpp"
#include "topictrend/error.hpp"
#include "topictrend/reduce.hpp"

namespace topictrend::tune {

std::size_t Grid::combinations() const {
  return k.size() * metric.size() * min_cluster_size.size() * min_samples.size() * selection.size();
}

std::vector<TrialParams> enumerate(const Grid& grid) {
  if (grid.combinations() == 0) throw Error(Errc::config_error, "grid has an empty value list");
  std::vector<TrialParams> out;
  for (auto k : grid.k)
    for (auto metric : grid.metric)
      for (int mcs : grid.min_cluster_size)
        for (int ms : grid.min_samples)
          for (auto sel : grid.selection) {
            TrialParams p;
            p.k = k;
            p.density = {mcs, ms, metric, sel};
            out.push_back(p);
          }
  return out;
}

TrialResult run_trial(const Matrix& embeddings, const TrialParams& params, double fraction,
                      std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  TrialResult r;
  r.params = params;
  r.seed = seed;
  auto finish = [&]() -> TrialResult {
    r.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
  };

  const auto rows = embedstore::subsample_indices(embeddings.rows(), fraction, seed);
  const Matrix sample = embeddings.select_rows(rows);
  try {
    params.density.validate();
  } catch (const Error& e) {
    r.note = e.what();
    r.outlier_fraction = 1.0;
    return finish();
  }
  if (params.k < 1 || params.k > std::min(sample.rows(), sample.cols())) {
    r.note = "k=" + std::to_string(params.k) + " exceeds min(n, d) of the subsample";
    r.outlier_fraction = 1.0;
    return finish();
  }

  const auto projection = reduce::pca_fit(sample, params.k);
  const Matrix reduced = reduce::pca_transform(projection, sample);
  const auto clustering = cluster::density_cluster(reduced, params.density);
  const auto& a = clustering.assignment;
  r.clusters = a.cluster_count;
  r.outlier_fraction = sample.rows() ? static_cast<double>(a.outliers()) / static_cast<double>(sample.rows()) : 1.0;
  try {
    r.dbcv = cluster::dbcv(reduced, a.labels, params.density.metric);
  } catch (const Error& e) {
    if (e.code() != Errc::undefined_validity) throw;
    r.note = e.what();
  }
  return finish();
}

TuneResult grid_search(const Matrix& embeddings, const Grid& grid, const TuneOptions& options) {
  if (!(options.subsample_fraction > 0.0 && options.subsample_fraction <= 1.0))
    throw Error(Errc::invalid_argument, "subsample fraction must lie in (0, 1]");
  const auto combos = enumerate(grid);
  TuneResult result;
  result.trials.resize(combos.size());
  std::vector<std::exception_ptr> failures(combos.size());

  const auto count = static_cast<std::ptrdiff_t>(combos.size());
#pragma omp parallel for schedule(dynamic, 1) if (options.parallel_trials)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      result.trials[k] = run_trial(embeddings, combos[k], options.subsample_fraction, options.base_seed + k);
      result.trials[k].index = k;
    } catch (...) {
      failures[k] = std::current_exception();
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  bool any = false;
  for (std::size_t i = 0; i < result.trials.size(); ++i) {
    const auto& t = result.trials[i];
    if (!t.dbcv) continue;
    if (!any || *t.dbcv > *result.trials[result.best].dbcv) result.best = i;
    any = true;
  }
  if (!any) throw Error(Errc::no_valid_configuration, "no valid configuration: every trial has undefined DBCV");
  return result;
}

std::string trials_csv(const TuneResult& result) {
  std::ostringstream out;
  out << "trial,k,metric,min_cluster_size,min_samples,selection,dbcv,clusters,outlier_fraction,seed,ms\n";
  char buf[64];
  for (const auto& t : result.trials) {
    const auto& d = t.params.density;
    out << t.index << ',' << t.params.k << ',' << cluster::to_string(d.metric) << ',' << d.min_cluster_size
        << ',' << d.min_samples << ',' << cluster::to_string(d.selection) << ',';
    if (t.dbcv) {
      std::snprintf(buf, sizeof buf, "%.17g", *t.dbcv);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", t.outlier_fraction);
    out << ',' << t.clusters << ',' << buf << ',' << t.seed << ',';
    std::snprintf(buf, sizeof buf, "%.1f", t.ms);
    out << buf << '\n';
  }
  return out.str();
}

}  // namespace topictrend::tune
