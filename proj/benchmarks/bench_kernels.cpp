#include <benchmark/benchmark.h>

#include <random>

#include "lat72/catalog.hpp"
#include "lat72/census.hpp"
#include "lat72/decomp.hpp"
#include "lat72/enumerate.hpp"
#include "lat72/linalg.hpp"
#include "lat72/polarization.hpp"

using namespace lat72;

namespace {

const IntegerLattice& leech() {
  static const IntegerLattice l = build_leech(false);
  return l;
}

CensusContext& census() {
  static CensusContext* ctx = [] {
    auto* c = new CensusContext(swap_halves(polarization_from_structure(leech(), load_structure(leech_structure_path()))));
    c->prepare_classes();
    c->prepare_classifier();
    return c;
  }();
  return *ctx;
}

DecompContext& decomp() {
  static DecompContext* ctx = [] {
    auto* c = new DecompContext(split(build_gamma()));
    c->prepare_minimal_i1();
    return c;
  }();
  return *ctx;
}

}  // namespace

static void BM_ShortVectorsE8(benchmark::State& state) {
  auto e8 = build_e8();
  Enumerator e(e8);
  for (auto _ : state) benchmark::DoNotOptimize(e.short_vectors(state.range(0)).total());
}
BENCHMARK(BM_ShortVectorsE8)->Arg(4)->Arg(8)->Arg(12);

static void BM_LeechMinimalVectors(benchmark::State& state) {
  Enumerator e(leech());
  for (auto _ : state) benchmark::DoNotOptimize(e.short_vectors(4).total());
  state.SetItemsProcessed(state.iterations() * 196560);
}
BENCHMARK(BM_LeechMinimalVectors)->Unit(benchmark::kMillisecond);

static void BM_LeechReduction(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reduce_basis(leech()).transform.rows());
}
BENCHMARK(BM_LeechReduction)->Unit(benchmark::kMillisecond);

// One coset w + x + y + 2L by enumeration and by the class table.
static void BM_CosetCounts(benchmark::State& state) {
  auto& ctx = census();
  const auto& w = ctx.classes().classes[7].rep();
  auto w2 = w2_set(ctx, w);
  Coords v = w;
  for (std::size_t k = 0; k < v.size(); ++k) v[k] += w2[0][k] + w2[5][k];
  bool fast = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(fast ? ctx.coset_counts_fast(v) : ctx.coset_counts(v));
}
BENCHMARK(BM_CosetCounts)->ArgName("fast")->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

static void BM_W2Set(benchmark::State& state) {
  auto& ctx = census();
  const auto& w = ctx.classes().classes[11].rep();
  for (auto _ : state) benchmark::DoNotOptimize(w2_set(ctx, w).size());
}
BENCHMARK(BM_W2Set)->Unit(benchmark::kMillisecond);

static void BM_HermiteModular(benchmark::State& state) {
  const std::size_t n = state.range(0);
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> entry(-50, 50);
  IntMatrix gens(2 * n, n);
  for (std::size_t i = 0; i < gens.rows(); ++i)
    for (std::size_t j = 0; j < n; ++j) gens(i, j) = entry(rng);
  for (auto _ : state) benchmark::DoNotOptimize(hermite_basis(gens, 2).rows());
}
BENCHMARK(BM_HermiteModular)->Arg(24)->Arg(72)->Unit(benchmark::kMillisecond);

static void BM_ConstructionIE8(benchmark::State& state) {
  auto e8 = build_e8();
  auto p = polarization_from_structure(e8, find_structure(e8));
  for (auto _ : state) benchmark::DoNotOptimize(construction_I(p, 3).rank());
}
BENCHMARK(BM_ConstructionIE8)->Unit(benchmark::kMillisecond);

static void BM_BuildGamma(benchmark::State& state) {
  auto sp = load_structure(leech_structure_path());
  for (auto _ : state) benchmark::DoNotOptimize(build_gamma(leech(), sp).blocks.rank());
}
BENCHMARK(BM_BuildGamma)->Unit(benchmark::kMillisecond)->Iterations(3);

// The 48-dimensional coset search behind each I(w) check.
static void BM_CheckIw(benchmark::State& state) {
  auto& ctx = decomp();
  auto w = lift_minimal(ctx, ctx.minimal_i1()[state.range(0)]).w;
  for (auto _ : state) {
    auto r = check_Iw(ctx, w);
    state.counters["nodes"] = static_cast<double>(r.nodes);
  }
}
BENCHMARK(BM_CheckIw)->Arg(0)->Arg(40000)->Unit(benchmark::kMillisecond)->Iterations(2);

BENCHMARK_MAIN();
