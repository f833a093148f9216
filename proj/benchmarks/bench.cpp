#include <benchmark/benchmark.h>

#include <memory>
#include <random>
#include <vector>

#include "wellcheck/analysis.hpp"
#include "wellcheck/errors.hpp"
#include "wellcheck/perturbation.hpp"
#include "wellcheck/well_groups.hpp"

using namespace wellcheck;

namespace {

// A path of n vertices carrying a random walk, so that a target near zero is
// crossed many times.
Instance random_walk(std::size_t n, std::uint32_t seed, PerturbationFamily family, std::vector<double> targets) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> step(0.0, 1.0);
  std::vector<Vertex> verts;
  std::vector<Edge> edges;
  std::vector<double> values;
  double y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    verts.push_back({static_cast<int>(i), static_cast<double>(i)});
    values.push_back(y);
    y += step(rng);
    if (i + 1 < n) edges.push_back({i, i + 1, 1.0});
  }
  auto c = std::make_shared<const Complex1D>("walk", std::move(verts), std::move(edges));
  return refine_instance(Instance{c, ScalarField(c, std::move(values)), TargetSet(std::move(targets)),
                                  std::move(family), RadiiSpec{}});
}

void BM_MergeTree(benchmark::State& state) {
  const Instance inst = random_walk(static_cast<std::size_t>(state.range(0)), 1, PerturbationFamily::full(), {0.0});
  const WellField w = well_field_prime(inst.field, inst.targets);
  for (auto _ : state) {
    MergeTree tree(w);
    benchmark::DoNotOptimize(tree.merges().size());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MergeTree)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_WellDiagramFull(benchmark::State& state) {
  const Instance inst = random_walk(static_cast<std::size_t>(state.range(0)), 2, PerturbationFamily::full(), {0.0});
  const MergeTree tree(well_field_prime(inst.field, inst.targets));
  for (auto _ : state) {
    const WellDiagram d = well_diagram(tree, inst.field, inst.targets, inst.family, inst.radii);
    benchmark::DoNotOptimize(d.fibers.size());
  }
}
BENCHMARK(BM_WellDiagramFull)->RangeMultiplier(4)->Range(16, 256);

void BM_WellDiagramShift(benchmark::State& state) {
  const Instance inst =
      random_walk(static_cast<std::size_t>(state.range(0)), 3, PerturbationFamily::shift(), {-1.0, 1.0});
  const MergeTree tree(well_field_for(inst.field, inst.targets, inst.family));
  for (auto _ : state) {
    const WellDiagram d = well_diagram(tree, inst.field, inst.targets, inst.family, inst.radii);
    benchmark::DoNotOptimize(d.fibers.size());
  }
}
BENCHMARK(BM_WellDiagramShift)->RangeMultiplier(4)->Range(16, 256);

void BM_LatticeSearch(benchmark::State& state) {
  const Instance inst = random_walk(static_cast<std::size_t>(state.range(0)), 4, PerturbationFamily::full(), {0.0});
  const MergeTree tree(well_field_prime(inst.field, inst.targets));
  const double r = 0.5;
  const auto comps = tree.components_at(r);
  LatticeOptions options;
  options.resolution = 0.1;
  for (auto _ : state) {
    std::size_t found = 0;
    for (const auto& comp : comps) {
      try {
        found += lattice_search(inst.field, inst.targets, r, comp, options) ? 1 : 0;
      } catch (const PreconditionError&) {
      }
    }
    benchmark::DoNotOptimize(found);
  }
}
BENCHMARK(BM_LatticeSearch)->Arg(8)->Arg(16)->Arg(32);

}  // namespace
BENCHMARK_MAIN();
