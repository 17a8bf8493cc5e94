// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

// Serial reference kernels against their OpenMP counterparts.

#include <random>

#include <benchmark/benchmark.h>

#include "ame/numerics/kernels.hpp"

namespace {

ame::Tensor random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  ame::Tensor t({rows, cols});
  for (double& v : t.values()) v = g(rng);
  return t;
}

template <ame::Tensor (*Kernel)(const ame::Tensor&, const ame::Tensor&)>
void pairwise(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_matrix(n, 64, 1);
  const auto b = random_matrix(n, 64, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}

template <ame::kernels::IndexLists (*Kernel)(const ame::Tensor&, std::size_t)>
void top_k(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto scores = random_matrix(n, 4 * n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(scores, 5));
}

template <std::vector<std::size_t> (*Kernel)(const ame::Tensor&, const ame::kernels::IndexLists&)>
void ranks(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto scores = random_matrix(n, 5 * n, 4);
  ame::kernels::IndexLists gold(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < 5; ++j) gold[i].push_back(static_cast<ame::kernels::Index>(5 * i + j));
  }
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(scores, gold));
}

namespace serial = ame::kernels::serial;
namespace parallel = ame::kernels::parallel;

BENCHMARK(pairwise<serial::matmul_nt>)->Name("matmul_nt/serial")->Arg(256)->Arg(1024);
BENCHMARK(pairwise<parallel::matmul_nt>)->Name("matmul_nt/parallel")->Arg(256)->Arg(1024);
BENCHMARK(pairwise<serial::order_similarity>)->Name("order_similarity/serial")->Arg(256)->Arg(1024);
BENCHMARK(pairwise<parallel::order_similarity>)->Name("order_similarity/parallel")->Arg(256)->Arg(1024);
BENCHMARK(top_k<serial::top_k_rows>)->Name("top_k_rows/serial")->Arg(256)->Arg(1024);
BENCHMARK(top_k<parallel::top_k_rows>)->Name("top_k_rows/parallel")->Arg(256)->Arg(1024);
BENCHMARK(ranks<serial::best_gold_ranks>)->Name("best_gold_ranks/serial")->Arg(200)->Arg(1000);
BENCHMARK(ranks<parallel::best_gold_ranks>)->Name("best_gold_ranks/parallel")->Arg(200)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
