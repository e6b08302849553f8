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

#ifndef INSFUSE_EVALUATION_HPP_
#define INSFUSE_EVALUATION_HPP_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "insfuse/io.hpp"
#include "insfuse/types.hpp"

namespace insfuse {

// Non-interpolated AP over the first `depth` entries, normalized by the
// number of relevant shots in the qrels. Throws UndefinedTopicError when the
// topic has no relevant shot.
double average_precision(const Ranking& ranking, const Qrels& qrels,
                         std::size_t depth = kDefaultRunDepth);

// Throws std::invalid_argument on an empty list.
double mean_ap(std::span<const double> per_topic);

struct EvalReport {
  std::map<std::string, double> per_topic;
  double map = 0.0;
  std::size_t depth = kDefaultRunDepth;
};

// Scores every qrels topic with at least one relevant shot; a topic with no
// ranking in `rankings` scores 0.
EvalReport evaluate(std::span<const Ranking> rankings, const Qrels& qrels,
                    std::size_t depth = kDefaultRunDepth);

// "topic<TAB>AP" lines (when per_topic) then "mAP<TAB>value", four decimals.
std::string format_report(const EvalReport& report, bool per_topic);

// Fraction of discordant pairs between two orderings of the same set.
// Throws std::invalid_argument when the sets differ or contain duplicates.
double kendall_tau(std::span<const std::string> order_a, std::span<const std::string> order_b);

}  // namespace insfuse

#endif  // INSFUSE_EVALUATION_HPP_
