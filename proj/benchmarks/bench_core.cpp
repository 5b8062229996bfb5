#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "ruelle/applications.hpp"
#include "ruelle/open_system.hpp"
#include "ruelle/spectral.hpp"

using namespace ruelle;

namespace {

StructurePtr random_primitive(std::size_t n, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(density);
  std::vector<std::vector<int>> m(n, std::vector<int>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = coin(rng) ? 1 : 0;
    m[i][(i + 1) % n] = 1;
  }
  m[0][0] = 1;
  return from_matrix(m);
}

Potential random_depth2(const StructurePtr& ts, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::map<Word, double> w;
  for (const Word& x : admissible_words(*ts, 2)) w[x] = u(rng);
  return Potential::table(ts, 2, w);
}

void BM_Classify(benchmark::State& state) {
  const auto ts = random_primitive(static_cast<std::size_t>(state.range(0)), 0.05, 1);
  for (auto _ : state) benchmark::DoNotOptimize(classify(*ts));
}
BENCHMARK(BM_Classify)->Arg(64)->Arg(256)->Arg(1024);

void BM_RpfTriplet(benchmark::State& state) {
  const auto ts = random_primitive(static_cast<std::size_t>(state.range(0)), 0.05, 2);
  const Potential phi = random_depth2(ts, 3);
  const TransferMatrix tm(ts, phi, 1);
  for (auto _ : state) benchmark::DoNotOptimize(rpf_triplet(tm));
}
BENCHMARK(BM_RpfTriplet)->Arg(64)->Arg(256)->Arg(1024);

void BM_TransferMatrixDepth(benchmark::State& state) {
  const auto ts = full_shift(2);
  const Potential phi = Potential::constant(ts, 0.0);
  const auto m = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(TransferMatrix(ts, phi, m).size());
}
BENCHMARK(BM_TransferMatrixDepth)->Arg(8)->Arg(12)->Arg(16);

void BM_SpectralDecomposition(benchmark::State& state) {
  const auto ts = random_primitive(static_cast<std::size_t>(state.range(0)), 0.2, 4);
  const Potential phi = random_depth2(ts, 5);
  const TransferMatrix tm(ts, phi, 1);
  const RpfTriplet t = rpf_triplet(tm);
  const PeriodClasses pc = period_classes(*ts);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_decomposition(tm, pc, t));
}
BENCHMARK(BM_SpectralDecomposition)->Arg(16)->Arg(64);

void BM_SurvivorMasses(benchmark::State& state) {
  const auto closed = full_shift(2);
  const OpenSystem os(make_hole(with_hole(closed, {{0, 0}})), Potential::constant(closed, 0.0));
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(log_survivor_masses(os, n));
}
BENCHMARK(BM_SurvivorMasses)->Arg(40)->Arg(1000);

void BM_MonteCarlo(benchmark::State& state) {
  const auto closed = full_shift(2);
  const OpenSystem os(make_hole(with_hole(closed, {{0, 0}})), Potential::constant(closed, 0.0));
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_survival(os, 10, 100000, 1));
}
BENCHMARK(BM_MonteCarlo)->Unit(benchmark::kMillisecond);

void BM_BowenDimension(benchmark::State& state) {
  GifsSpec g;
  for (int i = 0; i < state.range(0); ++i) g.edges.push_back({0, 0, 0.9 / static_cast<double>(state.range(0)), ""});
  for (auto _ : state) benchmark::DoNotOptimize(bowen_dimension(g));
}
BENCHMARK(BM_BowenDimension)->Arg(2)->Arg(16);

void BM_Renewal(benchmark::State& state) {
  RenewalSpec s;
  s.a = [](std::size_t i) { return std::pow(4.0, -static_cast<double>(i)); };
  s.b = s.a;
  s.truncation = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(renewal_analysis(s));
}
BENCHMARK(BM_Renewal)->Arg(30)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
