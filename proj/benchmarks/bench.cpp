#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>
#include <string>

#include "tdtf/attack_tree.hpp"
#include "tdtf/joint.hpp"
#include "tdtf/kde.hpp"
#include "tdtf/model.hpp"

using namespace tdtf;

namespace {

LibraryInstance instance(const std::string& artifact, int version, int day) {
  return LibraryInstance{LibraryId("bench", artifact), Version(std::to_string(version) + ".0"),
                         Date(day)};
}

// Random DAG over n distinct libraries, node 0 as root.
DependencySnapshot random_snapshot(std::mt19937_64& rng, std::size_t n, int root_version = 1) {
  std::vector<LibraryInstance> nodes{instance("root", root_version, 100 * root_version)};
  for (std::size_t i = 1; i < n; ++i) nodes.push_back(instance("lib" + std::to_string(i), 1, 0));
  std::vector<std::vector<std::size_t>> deps(n);
  std::bernoulli_distribution extra(0.05);
  for (std::size_t i = 1; i < n; ++i) {
    deps[std::uniform_int_distribution<std::size_t>(0, i - 1)(rng)].push_back(i);
  }
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (extra(rng) && std::find(deps[i].begin(), deps[i].end(), j) == deps[i].end()) deps[i].push_back(j);
    }
  }
  return DependencySnapshot::create(std::move(nodes), std::move(deps));
}

void BM_KdeFit(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::exponential_distribution<double> d(0.01);
  std::vector<double> xs(static_cast<std::size_t>(state.range(0)));
  for (auto& x : xs) x = d(rng);
  for (auto _ : state) benchmark::DoNotOptimize(fit_kde(ClusterId{"b"}, xs));
}
BENCHMARK(BM_KdeFit)->Arg(50)->Arg(500)->Arg(5000);

void BM_KdeCdf(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::exponential_distribution<double> d(0.01);
  std::vector<double> xs(static_cast<std::size_t>(state.range(0)));
  for (auto& x : xs) x = d(rng);
  const auto m = fit_kde(ClusterId{"b"}, xs);
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.cdf(t));
    t = t > 500.0 ? 0.0 : t + 1.7;
  }
}
BENCHMARK(BM_KdeCdf)->Arg(50)->Arg(500)->Arg(5000);

void BM_Propagate(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto s = random_snapshot(rng, static_cast<std::size_t>(state.range(0)));
  const auto tree = to_attack_tree(s);
  std::vector<std::optional<double>> p(s.size());
  std::uniform_real_distribution<double> u(0.0, 0.2);
  for (auto& x : p) x = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(propagate(tree, p));
}
BENCHMARK(BM_Propagate)->Arg(16)->Arg(128)->Arg(1024);

void BM_BuildTdt(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::vector<DependencySnapshot> snaps;
  for (int k = 1; k <= state.range(0); ++k) snaps.push_back(random_snapshot(rng, 64, k));
  for (auto _ : state) benchmark::DoNotOptimize(build_tdt(snaps));
}
BENCHMARK(BM_BuildTdt)->Arg(4)->Arg(32);

void BM_InclusionExclusion(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(static_cast<std::size_t>(state.range(0)));
  for (auto& x : p) x = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(inclusion_exclusion_union(p));
}
BENCHMARK(BM_InclusionExclusion)->DenseRange(4, 20, 8);

}  // namespace

BENCHMARK_MAIN();
