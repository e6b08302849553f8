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

#include "insfuse/rank_aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "insfuse/errors.hpp"

namespace insfuse {
namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

void check_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw NumericError(std::string("hq_aggregate: non-finite ") + what);
  }
}

}  // namespace

RankMatrix normalize_ranks(std::span<const Ranking> lists) {
  if (lists.empty()) throw std::invalid_argument("normalize_ranks: no input lists");
  RankMatrix matrix;
  matrix.topic_id = lists.front().topic_id;
  matrix.lists = lists.size();

  std::set<std::string> ids;
  for (const Ranking& list : lists) {
    for (const RankedShot& entry : list.entries) ids.insert(entry.shot_id);
  }
  if (ids.empty()) throw ValidationError("normalize_ranks: empty candidate union");
  matrix.candidate_ids.assign(ids.begin(), ids.end());

  std::unordered_map<std::string_view, std::size_t> column;
  for (std::size_t c = 0; c < matrix.candidate_ids.size(); ++c) {
    column.emplace(matrix.candidate_ids[c], c);
  }
  matrix.ranks.assign(matrix.lists * matrix.candidates(), 1.0);
  for (std::size_t m = 0; m < lists.size(); ++m) {
    const auto& entries = lists[m].entries;
    const std::size_t n = entries.size();
    for (std::size_t q = 0; q < n; ++q) {
      const double rank = n == 1 ? 0.0 : static_cast<double>(q) / static_cast<double>(n - 1);
      matrix.ranks[m * matrix.candidates() + column.at(entries[q].shot_id)] = rank;
    }
  }
  return matrix;
}

HqResult hq_aggregate(const RankMatrix& matrix, const HqParams& params,
                      std::string_view run_tag) {
  if (!(params.epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (params.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (params.sigma_hq && !(*params.sigma_hq > 0.0)) {
    throw std::invalid_argument("sigma_hq must be > 0");
  }
  const std::size_t lists = matrix.lists;
  const std::size_t n = matrix.candidates();
  if (lists == 0 || n == 0 || matrix.ranks.size() != lists * n) {
    throw std::invalid_argument("hq_aggregate: malformed rank matrix");
  }

  std::vector<double> consensus(n, 0.0);
  for (std::size_t m = 0; m < lists; ++m) {
    for (std::size_t c = 0; c < n; ++c) consensus[c] += matrix.at(m, c);
  }
  for (double& r : consensus) r /= static_cast<double>(lists);

  std::vector<double> distances(lists);
  auto update_distances = [&] {
    for (std::size_t m = 0; m < lists; ++m) {
      distances[m] = squared_distance(matrix.row(m), consensus);
    }
    check_finite(distances, "distance");
  };

  update_distances();
  double sigma_sq = 0.0;
  if (params.sigma_hq) {
    sigma_sq = *params.sigma_hq * *params.sigma_hq;
  } else {
    sigma_sq = std::max(median(distances), 1e-12);
  }

  HqResult result;
  result.sigma_hq = std::sqrt(sigma_sq);
  std::vector<double> alphas(lists);
  std::vector<double> next(n);
  for (int iter = 1; iter <= params.max_iters; ++iter) {
    // Shifting by the smallest distance only rescales alpha before
    // normalization and keeps the largest weight at exp(0) = 1.
    const double shift = *std::min_element(distances.begin(), distances.end());
    double total = 0.0;
    for (std::size_t m = 0; m < lists; ++m) {
      alphas[m] = std::exp(-(distances[m] - shift) / sigma_sq);
      total += alphas[m];
    }
    for (double& a : alphas) a /= total;
    check_finite(alphas, "weight");

    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t m = 0; m < lists; ++m) {
      const auto row = matrix.row(m);
      for (std::size_t c = 0; c < n; ++c) next[c] += alphas[m] * row[c];
    }
    check_finite(next, "consensus");

    double change = 0.0;
    for (std::size_t c = 0; c < n; ++c) change = std::max(change, std::abs(next[c] - consensus[c]));
    consensus.swap(next);
    result.iterations = iter;
    if (change < params.epsilon) {
      result.converged = true;
      break;
    }
    update_distances();
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (consensus[a] != consensus[b]) return consensus[a] < consensus[b];
    return matrix.candidate_ids[a] < matrix.candidate_ids[b];
  });
  result.consensus = Ranking{matrix.topic_id, {}, std::string(run_tag)};
  result.consensus.entries.reserve(n);
  for (std::size_t c : order) {
    result.consensus.entries.push_back(RankedShot{matrix.candidate_ids[c], 1.0 - consensus[c]});
  }
  result.consensus_ranks = std::move(consensus);
  result.alphas = std::move(alphas);
  return result;
}

}  // namespace insfuse
