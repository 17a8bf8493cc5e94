// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "ame/alignment/alignment.hpp"
#include "ame/error.hpp"
#include "ame/losses/losses.hpp"
#include "ame/numerics/ops.hpp"
#include "test_support.hpp"

namespace ame {
namespace {

using testing::max_abs_diff;
using testing::random_orthogonal;
using testing::random_unit_rows;

constexpr std::size_t kReserved = 2;

// Word rows after the two reserved rows (pad, unk), which stay zero.
Tensor with_reserved(const Tensor& words) {
  Tensor t({words.rows() + kReserved, words.cols()});
  for (std::size_t r = 0; r < words.rows(); ++r) std::copy_n(words.row(r).begin(), words.cols(), t.row(r + kReserved).begin());
  return t;
}

Tensor basis_table(std::size_t d) { return with_reserved(Tensor::identity(d)); }

double dot_rows(const Tensor& a, std::size_t i, const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t q = 0; q < v.size(); ++q) s += a(i, q) * v[q];
  return s;
}

std::vector<double> apply(const LinearMap& m, const Tensor& t, std::size_t row) {
  std::vector<double> out(m.dim(), 0.0);
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) out[i] += m.w(i, j) * t(row, j);
  return out;
}

// Indices of the k largest scores, best first, ties to the lower index.
std::vector<std::size_t> oracle_top_k(const std::vector<double>& scores, std::size_t k) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  idx.resize(k);
  return idx;
}

double oracle_mean_top_k(std::vector<double> scores, std::size_t k) {
  std::sort(scores.begin(), scores.end(), std::greater<>());
  return std::accumulate(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(k), 0.0) / static_cast<double>(k);
}

TEST(Neighborhoods, BasisNearestIsItself) {
  const Tensor x = basis_table(3);
  const Pool pool = full_pool(x);
  ASSERT_EQ(pool, (Pool{2, 3, 4}));
  const std::vector<TokenPair> pairs{{2, 2}, {4, 4}};
  const auto cache = compute_neighborhoods(x, x, pairs, LinearMap::identity(3), 1, pool, pool, 7);
  EXPECT_EQ(cache.k, 1u);
  EXPECT_EQ(cache.stamp, 7);
  ASSERT_EQ(cache.pairs(), 2u);
  EXPECT_EQ(cache.target_neighbors[0], (std::vector<kernels::Index>{2}));
  EXPECT_EQ(cache.target_neighbors[1], (std::vector<kernels::Index>{4}));
  EXPECT_EQ(cache.source_neighbors[1], (std::vector<kernels::Index>{4}));
}

TEST(Neighborhoods, KEqualToPoolReturnsWholePool) {
  std::mt19937_64 rng(1);
  const Tensor x = with_reserved(random_unit_rows(6, 3, rng));
  const Tensor y = with_reserved(random_unit_rows(6, 3, rng));
  const Pool pool = full_pool(x);
  const std::vector<TokenPair> pairs{{3, 5}};
  const auto cache = compute_neighborhoods(x, y, pairs, LinearMap::identity(3), 6, pool, pool, 0);
  auto t = cache.target_neighbors[0];
  auto s = cache.source_neighbors[0];
  std::sort(t.begin(), t.end());
  std::sort(s.begin(), s.end());
  EXPECT_EQ(std::vector<kernels::Index>(pool.begin(), pool.end()), t);
  EXPECT_EQ(std::vector<kernels::Index>(pool.begin(), pool.end()), s);
}

TEST(Neighborhoods, KOutsidePoolIsConfigError) {
  const Tensor x = basis_table(3);
  const Pool pool = full_pool(x);
  const std::vector<TokenPair> pairs{{2, 2}};
  EXPECT_THROW(compute_neighborhoods(x, x, pairs, LinearMap::identity(3), 4, pool, pool, 0), ConfigError);
  EXPECT_THROW(compute_neighborhoods(x, x, pairs, LinearMap::identity(3), 0, pool, pool, 0), ConfigError);
}

TEST(Neighborhoods, MatchExhaustiveSort) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 2 + rng() % 6;
    const std::size_t nx = 5 + rng() % 196, ny = 5 + rng() % 196;
    const std::size_t k = 1 + rng() % 5;
    const Tensor x = with_reserved(random_unit_rows(nx, d, rng));
    const Tensor y = with_reserved(random_unit_rows(ny, d, rng));
    const LinearMap w{random_orthogonal(d, rng), -1};
    const Pool sp = full_pool(x), tp = full_pool(y);
    std::vector<TokenPair> pairs;
    for (int i = 0; i < 10; ++i) pairs.emplace_back(sp[rng() % sp.size()], tp[rng() % tp.size()]);
    const auto cache = compute_neighborhoods(x, y, pairs, w, k, sp, tp, 0);

    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto wx = apply(w, x, pairs[i].first);
      std::vector<double> to_targets;
      for (auto t : tp) to_targets.push_back(dot_rows(y, t, wx));
      std::vector<kernels::Index> expect;
      for (auto j : oracle_top_k(to_targets, k)) expect.push_back(tp[j]);
      EXPECT_EQ(cache.target_neighbors[i], expect);

      std::vector<double> to_sources;
      for (auto s : sp) {
        const auto ws = apply(w, x, s);
        to_sources.push_back(dot_rows(y, pairs[i].second, ws));
      }
      expect.clear();
      for (auto j : oracle_top_k(to_sources, k)) expect.push_back(sp[j]);
      EXPECT_EQ(cache.source_neighbors[i], expect);
    }
  }
}

TEST(Csls, BasisScores) {
  const Tensor x = basis_table(2);
  const auto ranked = csls_translate(2, x, x, LinearMap::identity(2), 1);
  ASSERT_EQ(ranked.size(), 2u);
  EXPECT_EQ(ranked[0].target, 2u);
  EXPECT_NEAR(ranked[0].score, 0.0, 1e-12);
  EXPECT_EQ(ranked[1].target, 3u);
  EXPECT_NEAR(ranked[1].score, -2.0, 1e-12);
}

TEST(Csls, MatchesBruteForce) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = std::vector<std::size_t>{1, 4, 5}[trial % 3];
    const std::size_t d = 3 + rng() % 4;
    const std::size_t nx = 8 + rng() % 30, ny = 8 + rng() % 30;
    const Tensor x = with_reserved(random_unit_rows(nx, d, rng));
    const Tensor y = with_reserved(random_unit_rows(ny, d, rng));
    const LinearMap w{random_orthogonal(d, rng), -1};
    const CslsIndex index(x, y, w, k, full_pool(x), full_pool(y));

    std::vector<std::vector<double>> mapped;
    for (std::size_t s = kReserved; s < x.rows(); ++s) mapped.push_back(apply(w, x, s));
    std::vector<double> r_x;
    for (std::size_t t = kReserved; t < y.rows(); ++t) {
      std::vector<double> c;
      for (const auto& m : mapped) c.push_back(dot_rows(y, t, m));
      r_x.push_back(oracle_mean_top_k(c, k));
    }
    for (std::size_t s = kReserved; s < x.rows(); ++s) {
      const auto& wx = mapped[s - kReserved];
      std::vector<double> cos;
      for (std::size_t t = kReserved; t < y.rows(); ++t) cos.push_back(dot_rows(y, t, wx));
      const double r_y = oracle_mean_top_k(cos, k);
      std::vector<double> expect;
      for (std::size_t j = 0; j < cos.size(); ++j) expect.push_back(2 * cos[j] - r_y - r_x[j]);
      const auto got = index.scores(static_cast<kernels::Index>(s));
      ASSERT_EQ(got.size(), expect.size());
      for (std::size_t j = 0; j < got.size(); ++j) EXPECT_NEAR(got[j], expect[j], 1e-12);
      EXPECT_EQ(index.best(static_cast<kernels::Index>(s)), oracle_top_k(expect, 1)[0] + kReserved);
    }
  }
}

TEST(Csls, ArgmaxInvariantUnderMapScaling) {
  std::mt19937_64 rng(4);
  const Tensor x = with_reserved(random_unit_rows(30, 5, rng));
  const Tensor y = with_reserved(random_unit_rows(30, 5, rng));
  const LinearMap w{random_orthogonal(5, rng), -1};
  LinearMap scaled = w;
  for (double& v : scaled.w.values()) v *= 3.0;
  const CslsIndex a(x, y, w, 4, full_pool(x), full_pool(y));
  const CslsIndex b(x, y, scaled, 4, full_pool(x), full_pool(y));
  for (kernels::Index s = kReserved; s < x.rows(); ++s) EXPECT_EQ(a.best(s), b.best(s));
}

TEST(Csls, TranslateOrdersByScore) {
  std::mt19937_64 rng(5);
  const Tensor x = with_reserved(random_unit_rows(12, 4, rng));
  const auto ranked = csls_translate(5, x, x, LinearMap::identity(4), 3);
  EXPECT_EQ(ranked.size(), 12u);
  EXPECT_EQ(ranked.front().target, 5u);
  for (std::size_t i = 1; i < ranked.size(); ++i) EXPECT_GE(ranked[i - 1].score, ranked[i].score);
}

TEST(AlignmentRatio, IdenticalSpaces) {
  std::mt19937_64 rng(6);
  const Tensor x = with_reserved(random_unit_rows(10, 6, rng));
  std::vector<TokenPair> pairs;
  for (TokenId i = kReserved; i < x.rows(); ++i) pairs.emplace_back(i, i);
  EXPECT_DOUBLE_EQ(alignment_ratio(pairs, x, x, LinearMap::identity(6), 3), 1.0);
}

TEST(AlignmentRatio, PermutedTargets) {
  std::mt19937_64 rng(7);
  const Tensor words = random_unit_rows(10, 6, rng);
  Tensor shifted({10, 6});
  for (std::size_t r = 0; r < 10; ++r) std::copy_n(words.row((r + 1) % 10).begin(), 6, shifted.row(r).begin());
  const Tensor x = with_reserved(words), y = with_reserved(shifted);
  std::vector<TokenPair> pairs;
  for (TokenId i = kReserved; i < x.rows(); ++i) pairs.emplace_back(i, i);
  EXPECT_DOUBLE_EQ(alignment_ratio(pairs, x, y, LinearMap::identity(6), 3), 0.0);
}

TEST(AlignmentRatio, CountsDistinctSources) {
  std::mt19937_64 rng(8);
  const Tensor x = with_reserved(random_unit_rows(10, 6, rng));
  std::vector<TokenPair> pairs;
  for (TokenId i = 2; i < 9; ++i) pairs.emplace_back(i, i);
  for (TokenId i = 9; i < 12; ++i) pairs.emplace_back(i, i == 11 ? 2 : i + 1);
  EXPECT_NEAR(alignment_ratio(pairs, x, x, LinearMap::identity(6), 3), 0.7, 1e-15);
  // a second gold target for a source counts once, and a hit on either is a hit
  pairs.emplace_back(9, 9);
  pairs.emplace_back(2, 3);
  EXPECT_NEAR(alignment_ratio(pairs, x, x, LinearMap::identity(6), 3), 0.8, 1e-15);
}

TEST(AlignmentRatio, EmptyLexiconIsConfigError) {
  const Tensor x = basis_table(2);
  EXPECT_THROW(alignment_ratio({}, x, x, LinearMap::identity(2), 1), ConfigError);
}

TEST(AlignmentUpdate, AlignedSpacesAreStationary) {
  std::mt19937_64 rng(9);
  Tensor x = with_reserved(random_unit_rows(15, 5, rng));
  Tensor y = x;
  const Tensor before = x;
  LinearMap w = LinearMap::identity(5);
  std::vector<TokenPair> pairs;
  for (TokenId i = kReserved; i < x.rows(); ++i) pairs.emplace_back(i, i);
  const auto r = alignment_update(x, y, w, pairs, {1, 2.0, true}, 0);
  EXPECT_NEAR(r.loss_before, 0.0, 1e-12);
  EXPECT_LE(max_abs_diff(w.w, Tensor::identity(5)), 1e-12);
  EXPECT_LE(max_abs_diff(x, before), 1e-12);
  EXPECT_LE(max_abs_diff(y, before), 1e-12);
}

TEST(AlignmentUpdate, KeepsMapOrthogonalAndRowsUnit) {
  std::mt19937_64 rng(10);
  Tensor x = with_reserved(random_unit_rows(30, 8, rng));
  Tensor y = with_reserved(random_unit_rows(30, 8, rng));
  LinearMap w{random_orthogonal(8, rng), -1};
  std::vector<TokenPair> pairs;
  for (TokenId i = kReserved; i < 22; ++i) pairs.emplace_back(i, static_cast<TokenId>(kReserved + (i * 7) % 30));
  double worst = 0.0;
  for (int step = 0; step < 1000; ++step) {
    alignment_update(x, y, w, pairs, {4, 5.0, true}, step);
    worst = std::max(worst, orthogonality_error(w.w));
  }
  EXPECT_LE(worst, 1e-5);
  for (const auto& [s, t] : pairs) {
    EXPECT_NEAR(norm(x.row(s)), 1.0, 1e-12);
    EXPECT_NEAR(norm(y.row(t)), 1.0, 1e-12);
  }
  for (std::size_t r = 0; r < kReserved; ++r) EXPECT_EQ(norm(x.row(r)), 0.0);
}

TEST(AlignmentUpdate, SmallStepDescends) {
  for (std::uint64_t seed = 11; seed < 31; ++seed) {
    std::mt19937_64 rng(seed);
    Tensor x = with_reserved(random_unit_rows(25, 6, rng));
    Tensor y = with_reserved(random_unit_rows(25, 6, rng));
    LinearMap w{random_orthogonal(6, rng), -1};
    std::vector<TokenPair> pairs;
    for (TokenId i = kReserved; i < 17; ++i) pairs.emplace_back(i, i);
    const auto r = alignment_update(x, y, w, pairs, {3, 0.01, false}, 0);
    const double after = rcsls_loss(x, y, pairs, w, r.neighborhoods, 3, 0).value;
    EXPECT_LT(after, r.loss_before) << "seed " << seed;
  }
}

}  // namespace
}  // namespace ame
