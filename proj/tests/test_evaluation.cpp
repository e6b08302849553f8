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
#include "oracles.hpp"

using namespace insfuse;
using fixtures::ranking;

namespace {

Qrels qrels_of(std::initializer_list<std::pair<std::string, int>> items) {
  Qrels q;
  for (const auto& [shot, rel] : items) q.set("t", shot, rel);
  return q;
}

}  // namespace

TEST(AveragePrecision, HandCase) {
  const Qrels q = qrels_of({{"a", 1}, {"b", 0}, {"c", 1}});
  EXPECT_NEAR(average_precision(ranking("t", {"a", "b", "c"}), q), 0.833333, 1e-6);
  EXPECT_DOUBLE_EQ(average_precision(ranking("t", {"a", "b", "c"}), q), 0.5 * (1.0 + 2.0 / 3.0));
}

TEST(AveragePrecision, PerfectAndEmpty) {
  const Qrels q = qrels_of({{"a", 1}, {"b", 1}, {"c", 0}});
  EXPECT_DOUBLE_EQ(average_precision(ranking("t", {"b", "a", "c"}), q), 1.0);
  EXPECT_DOUBLE_EQ(average_precision(ranking("t", {"c"}), q), 0.0);
}

TEST(AveragePrecision, DenominatorCountsUnretrievedRelevant) {
  const Qrels q = qrels_of({{"a", 1}, {"b", 1}});
  EXPECT_DOUBLE_EQ(average_precision(ranking("t", {"a"}), q), 0.5);
}

TEST(AveragePrecision, DepthCutsTheList) {
  const Qrels q = qrels_of({{"a", 0}, {"b", 1}});
  EXPECT_DOUBLE_EQ(average_precision(ranking("t", {"a", "b"}), q, 1), 0.0);
  EXPECT_DOUBLE_EQ(average_precision(ranking("t", {"a", "b"}), q, 2), 0.5);
}

TEST(AveragePrecision, UndefinedWithoutRelevant) {
  EXPECT_THROW(average_precision(ranking("t", {"a"}), qrels_of({{"a", 0}})), UndefinedTopicError);
}

TEST(AveragePrecision, MatchesBruteForceOracle) {
  gen::Rng rng(103);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto c = gen::ranked(rng, 0, 50);
    std::vector<int> hits;
    for (const auto& e : c.ranking.entries) hits.push_back(c.qrels.relevance("t", e.shot_id));
    EXPECT_EQ(average_precision(c.ranking, c.qrels),
              oracle::average_precision(hits, c.qrels.relevant_count("t")));
  }
}

TEST(MeanAp, Means) {
  EXPECT_DOUBLE_EQ(mean_ap(std::vector<double>{0.5, 1.0}), 0.75);
  EXPECT_DOUBLE_EQ(mean_ap(std::vector<double>{0.435}), 0.435);
  EXPECT_DOUBLE_EQ(mean_ap(std::vector<double>{0, 0, 0}), 0.0);
  EXPECT_THROW(mean_ap(std::vector<double>{}), std::invalid_argument);
}

TEST(MeanAp, PermutationInvariant) {
  gen::Rng rng(107);
  std::vector<double> aps(20);
  for (double& x : aps) x = gen::uniform(rng);
  const double base = mean_ap(aps);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(aps.begin(), aps.end(), rng);
    EXPECT_NEAR(mean_ap(aps), base, 1e-15);
  }
}

TEST(Evaluate, CoversRelevantTopicsAndScoresMissingAsZero) {
  Qrels q;
  q.set("1", "a", 1);
  q.set("2", "b", 1);
  q.set("3", "c", 0);
  const std::vector<Ranking> runs{ranking("1", {"a"})};
  const EvalReport r = evaluate(runs, q);
  ASSERT_EQ(r.per_topic.size(), 2u);
  EXPECT_DOUBLE_EQ(r.per_topic.at("1"), 1.0);
  EXPECT_DOUBLE_EQ(r.per_topic.at("2"), 0.0);
  EXPECT_DOUBLE_EQ(r.map, 0.5);
}

TEST(Evaluate, ReportFormat) {
  EvalReport r;
  r.per_topic = {{"1", 1.0}, {"2", 0.25}};
  r.map = 0.625;
  EXPECT_EQ(format_report(r, true), "1\t1.0000\n2\t0.2500\nmAP\t0.6250\n");
  EXPECT_EQ(format_report(r, false), "mAP\t0.6250\n");
}

TEST(KendallTau, HandCases) {
  using S = std::vector<std::string>;
  EXPECT_DOUBLE_EQ(kendall_tau(S{"a", "b", "c"}, S{"a", "b", "c"}), 0.0);
  EXPECT_DOUBLE_EQ(kendall_tau(S{"a", "b", "c"}, S{"c", "b", "a"}), 1.0);
  EXPECT_DOUBLE_EQ(kendall_tau(S{"a", "b", "c"}, S{"a", "c", "b"}), 1.0 / 3.0);
}

TEST(KendallTau, MismatchRejected) {
  using S = std::vector<std::string>;
  EXPECT_THROW(kendall_tau(S{"a", "b"}, S{"a", "c"}), std::invalid_argument);
  EXPECT_THROW(kendall_tau(S{"a", "a"}, S{"a", "a"}), std::invalid_argument);
}

TEST(KendallTau, MatchesQuadraticOracle) {
  gen::Rng rng(109);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = gen::integer(rng, 2, 60);
    std::vector<std::string> a;
    for (int i = 0; i < n; ++i) a.push_back("x" + std::to_string(i));
    auto b = a;
    std::shuffle(a.begin(), a.end(), rng);
    std::shuffle(b.begin(), b.end(), rng);
    EXPECT_NEAR(kendall_tau(a, b), oracle::kendall(a, b), 1e-15);
  }
}
