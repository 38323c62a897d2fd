// Serial reference kernels against their OpenMP versions.
//   bench_kernels --benchmark_filter=Mst

#include <benchmark/benchmark.h>

#include <random>

#include "topictrend/kernels.hpp"

using namespace topictrend;

namespace {

Matrix random_matrix(std::size_t n, std::size_t d, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist;
  Matrix m(n, d);
  for (auto& v : m.data()) v = dist(gen);
  return m;
}

std::vector<int> round_robin_labels(std::size_t n, int k) {
  std::vector<int> l(n);
  for (std::size_t i = 0; i < n; ++i) l[i] = static_cast<int>(i % static_cast<std::size_t>(k));
  return l;
}

template <auto Fn>
void core_distances(benchmark::State& state) {
  const auto x = random_matrix(static_cast<std::size_t>(state.range(0)), 50, 1);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(x, 10, Metric::euclidean));
  state.SetComplexityN(state.range(0));
}

template <auto Core, auto Mst>
void mst(benchmark::State& state) {
  const auto x = random_matrix(static_cast<std::size_t>(state.range(0)), 50, 2);
  const auto core = Core(x, 10, Metric::euclidean);
  for (auto _ : state) benchmark::DoNotOptimize(Mst(x, core, Metric::euclidean));
  state.SetComplexityN(state.range(0));
}

template <auto Fn>
void silhouette(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = random_matrix(n, 50, 3);
  const auto labels = round_robin_labels(n, 8);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(x, labels, 8, Metric::euclidean));
}

template <auto Fn>
void covariance(benchmark::State& state) {
  const auto x = random_matrix(static_cast<std::size_t>(state.range(0)), 768, 4);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(x));
}

template <auto Fn>
void assign(benchmark::State& state) {
  const auto x = random_matrix(static_cast<std::size_t>(state.range(0)), 50, 5);
  const auto centroids = random_matrix(60, 50, 6);
  std::vector<double> d2;
  for (auto _ : state) benchmark::DoNotOptimize(Fn(x, centroids, d2));
}

}  // namespace

BENCHMARK(core_distances<kernels::serial::core_distances>)->Name("CoreDistances/serial")->Arg(1000)->Arg(4000);
BENCHMARK(core_distances<kernels::parallel::core_distances>)->Name("CoreDistances/omp")->Arg(1000)->Arg(4000)->UseRealTime();
BENCHMARK(mst<kernels::serial::core_distances, kernels::serial::mutual_reachability_mst>)->Name("Mst/serial")->Arg(1000)->Arg(4000);
BENCHMARK(mst<kernels::parallel::core_distances, kernels::parallel::mutual_reachability_mst>)->Name("Mst/omp")->Arg(1000)->Arg(4000)->UseRealTime();
BENCHMARK(silhouette<kernels::serial::silhouette_values>)->Name("Silhouette/serial")->Arg(2000);
BENCHMARK(silhouette<kernels::parallel::silhouette_values>)->Name("Silhouette/omp")->Arg(2000)->UseRealTime();
BENCHMARK(covariance<kernels::serial::covariance>)->Name("Covariance/serial")->Arg(2000);
BENCHMARK(covariance<kernels::parallel::covariance>)->Name("Covariance/omp")->Arg(2000)->UseRealTime();
BENCHMARK(assign<kernels::serial::assign_nearest>)->Name("AssignNearest/serial")->Arg(20000);
BENCHMARK(assign<kernels::parallel::assign_nearest>)->Name("AssignNearest/omp")->Arg(20000)->UseRealTime();

BENCHMARK_MAIN();
