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

#ifndef INSFUSE_RANK_AGGREGATION_HPP_
#define INSFUSE_RANK_AGGREGATION_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "insfuse/types.hpp"

namespace insfuse {

// Rows are lists, columns candidates; entries are normalized ranks in [0,1].
struct RankMatrix {
  std::string topic_id;
  std::vector<std::string> candidate_ids;  // ascending
  std::size_t lists = 0;
  std::vector<double> ranks;  // row-major, lists x candidate_ids.size()

  std::size_t candidates() const { return candidate_ids.size(); }
  double at(std::size_t list, std::size_t candidate) const {
    return ranks[list * candidates() + candidate];
  }
  std::span<const double> row(std::size_t list) const {
    return {ranks.data() + list * candidates(), candidates()};
  }
};

// Candidate at position q of a list of n gets q/(n-1) (0 when n == 1);
// candidates missing from a list get 1. Throws std::invalid_argument on no
// lists and ValidationError on an empty union.
RankMatrix normalize_ranks(std::span<const Ranking> lists);

struct HqParams {
  // Welsch scale. nullopt selects sigma^2 = median squared distance of the
  // lists to the mean-rank start (floored at 1e-12).
  std::optional<double> sigma_hq;
  double epsilon = 1e-9;
  int max_iters = 100;
};

struct HqResult {
  Ranking consensus;  // ascending consensus rank, score = 1 - rank
  std::vector<double> consensus_ranks;  // aligned with candidate_ids
  std::vector<double> alphas;  // normalized to sum 1
  double sigma_hq = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Half-quadratic reweighting with the Welsch potential. Starting from the
// mean of the rows, alternate
//   alpha_m = exp(-|R_m - R*|^2 / sigma^2),  alpha /= sum(alpha),
//   R* = sum_m alpha_m R_m
// until max |dR*| < epsilon or max_iters. Throws NumericError on a
// non-finite intermediate.
HqResult hq_aggregate(const RankMatrix& matrix, const HqParams& params,
                      std::string_view run_tag = kDefaultRunTag);

}  // namespace insfuse

#endif  // INSFUSE_RANK_AGGREGATION_HPP_
