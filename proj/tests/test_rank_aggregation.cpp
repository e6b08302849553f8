/*
 * Copyright 2026 The insfuse Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "generators.hpp"
#include "insfuse/errors.hpp"
#include "insfuse/evaluation.hpp"
#include "insfuse/rank_aggregation.hpp"
#include "oracles.hpp"

using namespace insfuse;
using fixtures::ranking;

namespace {

std::vector<std::vector<double>> rows_of(const RankMatrix& m) {
  std::vector<std::vector<double>> rows;
  for (std::size_t l = 0; l < m.lists; ++l) {
    rows.emplace_back(m.row(l).begin(), m.row(l).end());
  }
  return rows;
}

}  // namespace

TEST(NormalizeRanks, EvenlySpaced) {
  const std::vector<Ranking> lists{ranking("t", {"a", "b", "c", "d"})};
  const RankMatrix m = normalize_ranks(lists);
  EXPECT_EQ(m.candidate_ids, (std::vector<std::string>{"a", "b", "c", "d"}));
  EXPECT_DOUBLE_EQ(m.at(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(m.at(0, 1), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.at(0, 2), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.at(0, 3), 1.0);
}

TEST(NormalizeRanks, AbsentCandidateGetsWorstRank) {
  const std::vector<Ranking> lists{ranking("t", {"a", "b"}), ranking("t", {"a"})};
  const RankMatrix m = normalize_ranks(lists);
  EXPECT_DOUBLE_EQ(m.at(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(m.at(1, 1), 1.0);
}

TEST(NormalizeRanks, IdenticalListsIdenticalRows) {
  const std::vector<Ranking> lists{ranking("t", {"b", "a", "c"}), ranking("t", {"b", "a", "c"})};
  const RankMatrix m = normalize_ranks(lists);
  EXPECT_TRUE(std::equal(m.row(0).begin(), m.row(0).end(), m.row(1).begin()));
}

TEST(NormalizeRanks, EmptyInputsRejected) {
  EXPECT_THROW(normalize_ranks(std::vector<Ranking>{}), std::invalid_argument);
  EXPECT_THROW(normalize_ranks(std::vector<Ranking>{Ranking{"t", {}}}), ValidationError);
}

TEST(HqAggregate, IdenticalRowsAreAFixedPoint) {
  const std::vector<Ranking> lists(3, ranking("t", {"c", "a", "b", "d"}));
  const HqResult r = hq_aggregate(normalize_ranks(lists), HqParams{});
  EXPECT_EQ(r.iterations, 1);
  EXPECT_TRUE(r.converged);
  for (double a : r.alphas) EXPECT_DOUBLE_EQ(a, 1.0 / 3.0);
  EXPECT_EQ(fixtures::ids(r.consensus), (std::vector<std::string>{"c", "a", "b", "d"}));
}

TEST(HqAggregate, SingleListKeepsItsOrder) {
  const std::vector<Ranking> lists{ranking("t", {"z", "x", "y"})};
  const HqResult r = hq_aggregate(normalize_ranks(lists), HqParams{});
  EXPECT_EQ(fixtures::ids(r.consensus), (std::vector<std::string>{"z", "x", "y"}));
  EXPECT_DOUBLE_EQ(r.alphas[0], 1.0);
}

TEST(HqAggregate, ReversedListGetsSmallestWeight) {
  const std::vector<Ranking> lists{ranking("t", {"a", "b", "c"}), ranking("t", {"a", "b", "c"}),
                                   ranking("t", {"c", "b", "a"})};
  const HqResult r = hq_aggregate(normalize_ranks(lists), HqParams{});
  EXPECT_EQ(fixtures::ids(r.consensus), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_LT(r.alphas[2], r.alphas[0]);
  EXPECT_LT(r.alphas[2], r.alphas[1]);
  EXPECT_NEAR(r.alphas[0] + r.alphas[1] + r.alphas[2], 1.0, 1e-12);
}

TEST(HqAggregate, MatchesOracleWithFixedScale) {
  gen::Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto e = gen::ensemble(rng, gen::integer(rng, 3, 30), gen::integer(rng, 1, 5), 5);
    const RankMatrix m = normalize_ranks(e.lists);
    HqParams params;
    params.sigma_hq = gen::uniform(rng, 0.5, 3.0);
    const HqResult got = hq_aggregate(m, params);
    const auto want = oracle::half_quadratic(rows_of(m), *params.sigma_hq * *params.sigma_hq,
                                             params.epsilon, params.max_iters);
    EXPECT_EQ(got.iterations, want.iterations);
    for (std::size_t c = 0; c < m.candidates(); ++c) {
      EXPECT_NEAR(got.consensus_ranks[c], want.consensus[c], 1e-12);
    }
    for (std::size_t l = 0; l < m.lists; ++l) EXPECT_NEAR(got.alphas[l], want.alphas[l], 1e-12);
  }
}

TEST(HqAggregate, HugeScaleReducesToMeanRank) {
  gen::Rng rng(37);
  const auto e = gen::ensemble(rng, 20, 4, 6);
  const RankMatrix m = normalize_ranks(e.lists);
  HqParams params;
  params.sigma_hq = 1e6;
  const HqResult r = hq_aggregate(m, params);
  for (std::size_t c = 0; c < m.candidates(); ++c) {
    double mean = 0.0;
    for (std::size_t l = 0; l < m.lists; ++l) mean += m.at(l, c);
    EXPECT_NEAR(r.consensus_ranks[c], mean / static_cast<double>(m.lists), 1e-9);
  }
}

TEST(HqAggregate, ListOrderDoesNotMatter) {
  gen::Rng rng(41);
  auto e = gen::ensemble(rng, 25, 4, 8);
  const HqResult a = hq_aggregate(normalize_ranks(e.lists), HqParams{});
  std::reverse(e.lists.begin(), e.lists.end());
  const HqResult b = hq_aggregate(normalize_ranks(e.lists), HqParams{});
  EXPECT_EQ(fixtures::ids(a.consensus), fixtures::ids(b.consensus));
  for (std::size_t c = 0; c < a.consensus_ranks.size(); ++c) {
    EXPECT_NEAR(a.consensus_ranks[c], b.consensus_ranks[c], 1e-12);
  }
}

TEST(HqAggregate, AutoScaleIsMedianDistanceAtStart) {
  const std::vector<Ranking> lists{ranking("t", {"a", "b", "c"}), ranking("t", {"a", "c", "b"}),
                                   ranking("t", {"c", "b", "a"})};
  const RankMatrix m = normalize_ranks(lists);
  std::vector<double> mean(3, 0.0);
  for (std::size_t l = 0; l < 3; ++l) {
    for (std::size_t c = 0; c < 3; ++c) mean[c] += m.at(l, c) / 3.0;
  }
  std::vector<double> d;
  for (std::size_t l = 0; l < 3; ++l) {
    double s = 0.0;
    for (std::size_t c = 0; c < 3; ++c) s += (m.at(l, c) - mean[c]) * (m.at(l, c) - mean[c]);
    d.push_back(s);
  }
  std::sort(d.begin(), d.end());
  EXPECT_NEAR(hq_aggregate(m, HqParams{}).sigma_hq, std::sqrt(d[1]), 1e-15);
}

TEST(HqAggregate, BadParamsRejected) {
  const RankMatrix m = normalize_ranks(std::vector<Ranking>{ranking("t", {"a", "b"})});
  EXPECT_THROW(hq_aggregate(m, HqParams{std::nullopt, 0.0, 100}), std::invalid_argument);
  EXPECT_THROW(hq_aggregate(m, HqParams{std::nullopt, 1e-9, 0}), std::invalid_argument);
  EXPECT_THROW(hq_aggregate(m, HqParams{-1.0, 1e-9, 100}), std::invalid_argument);
}

TEST(HqAggregate, ConsensusBeatsNoisyListsOnSmallEnsembles) {
  gen::Rng rng(43);
  int wins = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto e = gen::ensemble(rng, 60, 5, 12);
    const HqResult r = hq_aggregate(normalize_ranks(e.lists), HqParams{});
    double best = 1.0;
    for (std::size_t l = 0; l + 1 < e.lists.size(); ++l) {
      best = std::min(best, kendall_tau(fixtures::ids(e.lists[l]), e.truth));
    }
    wins += kendall_tau(fixtures::ids(r.consensus), e.truth) <= best;
    EXPECT_TRUE(r.converged);
  }
  EXPECT_GE(wins, 18);
}
