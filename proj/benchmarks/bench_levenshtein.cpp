#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "restcheck/metrics/metrics.hpp"

namespace {

std::string random_text(std::mt19937& rng, std::size_t n) {
  static constexpr char kAlphabet[] = "abcdefghij (){}:=\n";
  std::uniform_int_distribution<std::size_t> pick(0, sizeof(kAlphabet) - 2);
  std::string s(n, ' ');
  for (auto& c : s) c = kAlphabet[pick(rng)];
  return s;
}

// Script-sized inputs where the edit touches a small part of the text.
void BM_LevenshteinLightEdit(benchmark::State& state) {
  std::mt19937 rng(7);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_text(rng, n);
  auto b = a;
  for (std::size_t i = 0; i < n; i += 50) b[i] = 'Z';
  for (auto _ : state) benchmark::DoNotOptimize(restcheck::metrics::levenshtein(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LevenshteinLightEdit)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oNSquared);

void BM_LevenshteinUnrelated(benchmark::State& state) {
  std::mt19937 rng(11);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_text(rng, n);
  const auto b = random_text(rng, n);
  for (auto _ : state) benchmark::DoNotOptimize(restcheck::metrics::levenshtein(a, b));
}
BENCHMARK(BM_LevenshteinUnrelated)->Arg(256)->Arg(2048);

}  // namespace
