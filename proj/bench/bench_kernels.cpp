#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>

#include "awgrpon/kernels.hpp"
#include "awgrpon/rwa_solver.hpp"

using namespace awgrpon;

namespace {

struct ScanFixture {
  Topology topology = Topology::build(TopologyParams{});
  SearchState state{topology, SolverConfig{}};
  std::vector<std::uint64_t> used;
  std::vector<kernels::PairCursor> cursors;
  std::vector<kernels::PairScan> out;

  ScanFixture() {
    std::mt19937_64 rng(1);
    used.resize(topology.links().size());
    for (auto& u : used) u = rng() & rng();
    const auto& t = state.options();
    cursors.resize(t.pair_count());
    for (std::size_t p = 0; p < cursors.size(); ++p) {
      cursors[p].next_option = t.pair_begin[p];
      cursors[p].remaining = 2;
    }
    out.resize(cursors.size());
  }
};

std::vector<RwaSolution> make_batch(const Topology& t, int n) {
  const RwaSolution full = solve(t, SolverConfig{}).best;
  std::mt19937_64 rng(2);
  std::vector<RwaSolution> batch;
  for (int i = 0; i < n; ++i) {
    RwaSolution s = full;
    std::shuffle(s.assignments.begin(), s.assignments.end(), rng);
    batch.push_back(std::move(s));
  }
  return batch;
}

void BM_ScanSerial(benchmark::State& st) {
  ScanFixture f;
  for (auto _ : st) {
    kernels::scan_pairs_serial(f.state.options(), f.used, f.cursors, f.out);
    benchmark::DoNotOptimize(f.out.data());
  }
}

void BM_ScanParallel(benchmark::State& st) {
  ScanFixture f;
  for (auto _ : st) {
    kernels::scan_pairs_parallel(f.state.options(), f.used, f.cursors, f.out);
    benchmark::DoNotOptimize(f.out.data());
  }
}

void BM_VerifyBatchSerial(benchmark::State& st) {
  const Topology t = Topology::build(TopologyParams{});
  const auto batch = make_batch(t, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::verify_batch_serial(t, batch, VerifyMode::FreePermutation));
}

void BM_VerifyBatchParallel(benchmark::State& st) {
  const Topology t = Topology::build(TopologyParams{});
  const auto batch = make_batch(t, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::verify_batch_parallel(t, batch, VerifyMode::FreePermutation));
}

std::vector<int> sweep_ks() {
  std::vector<int> ks;
  for (int rep = 0; rep < 1000; ++rep) {
    for (int k = 2; k <= 96; k += 2) ks.push_back(k);
  }
  return ks;
}

void BM_SweepSerial(benchmark::State& st) {
  const auto ks = sweep_ks();
  for (auto _ : st) {
    benchmark::DoNotOptimize(kernels::fat_tree_sweep_serial(ks, FormulaMode::DerivedStandard, PowerCatalog{}));
  }
}

void BM_SweepParallel(benchmark::State& st) {
  const auto ks = sweep_ks();
  for (auto _ : st) {
    benchmark::DoNotOptimize(kernels::fat_tree_sweep_parallel(ks, FormulaMode::DerivedStandard, PowerCatalog{}));
  }
}

}  // namespace

BENCHMARK(BM_ScanSerial);
BENCHMARK(BM_ScanParallel);
BENCHMARK(BM_VerifyBatchSerial)->Arg(16)->Arg(64);
BENCHMARK(BM_VerifyBatchParallel)->Arg(16)->Arg(64);
BENCHMARK(BM_SweepSerial);
BENCHMARK(BM_SweepParallel);

BENCHMARK_MAIN();
