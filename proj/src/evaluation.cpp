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

#include "insfuse/evaluation.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "insfuse/errors.hpp"

namespace insfuse {
namespace {

// Sorts `values` and returns the number of inversions.
std::uint64_t count_inversions(std::vector<std::size_t>& values,
                               std::vector<std::size_t>& scratch, std::size_t lo,
                               std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t count = count_inversions(values, scratch, lo, mid) +
                        count_inversions(values, scratch, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (values[j] < values[i]) {
      count += mid - i;
      scratch[k++] = values[j++];
    } else {
      scratch[k++] = values[i++];
    }
  }
  while (i < mid) scratch[k++] = values[i++];
  while (j < hi) scratch[k++] = values[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
            scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            values.begin() + static_cast<std::ptrdiff_t>(lo));
  return count;
}

}  // namespace

double average_precision(const Ranking& ranking, const Qrels& qrels, std::size_t depth) {
  const std::size_t relevant = qrels.relevant_count(ranking.topic_id);
  if (relevant == 0) {
    throw UndefinedTopicError("topic " + ranking.topic_id + " has no relevant shots");
  }
  const std::size_t n = std::min(depth, ranking.entries.size());
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < n; ++r) {
    if (qrels.relevance(ranking.topic_id, ranking.entries[r].shot_id) == 1) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
  }
  return sum / static_cast<double>(relevant);
}

double mean_ap(std::span<const double> per_topic) {
  if (per_topic.empty()) throw std::invalid_argument("mean_ap: no topics");
  return std::accumulate(per_topic.begin(), per_topic.end(), 0.0) /
         static_cast<double>(per_topic.size());
}

EvalReport evaluate(std::span<const Ranking> rankings, const Qrels& qrels, std::size_t depth) {
  EvalReport report;
  report.depth = depth;
  std::unordered_map<std::string_view, const Ranking*> by_topic;
  for (const Ranking& r : rankings) by_topic.emplace(r.topic_id, &r);
  std::vector<double> values;
  for (const std::string& topic : qrels.topics()) {
    if (qrels.relevant_count(topic) == 0) continue;
    auto it = by_topic.find(topic);
    const double ap = it == by_topic.end() ? 0.0 : average_precision(*it->second, qrels, depth);
    report.per_topic.emplace(topic, ap);
    values.push_back(ap);
  }
  report.map = mean_ap(values);
  return report;
}

std::string format_report(const EvalReport& report, bool per_topic) {
  std::string out;
  char line[256];
  if (per_topic) {
    for (const auto& [topic, ap] : report.per_topic) {
      std::snprintf(line, sizeof line, "%s\t%.4f\n", topic.c_str(), ap);
      out += line;
    }
  }
  std::snprintf(line, sizeof line, "mAP\t%.4f\n", report.map);
  out += line;
  return out;
}

double kendall_tau(std::span<const std::string> order_a, std::span<const std::string> order_b) {
  if (order_a.size() != order_b.size()) {
    throw std::invalid_argument("kendall_tau: orders have different sizes");
  }
  std::unordered_map<std::string_view, std::size_t> position;
  for (std::size_t i = 0; i < order_a.size(); ++i) {
    if (!position.emplace(order_a[i], i).second) {
      throw std::invalid_argument("kendall_tau: duplicate item " + order_a[i]);
    }
  }
  std::vector<std::size_t> mapped;
  mapped.reserve(order_b.size());
  std::vector<bool> used(order_b.size(), false);
  for (const std::string& item : order_b) {
    auto it = position.find(item);
    if (it == position.end()) throw std::invalid_argument("kendall_tau: set mismatch at " + item);
    if (used[it->second]) throw std::invalid_argument("kendall_tau: duplicate item " + item);
    used[it->second] = true;
    mapped.push_back(it->second);
  }
  const std::size_t n = mapped.size();
  if (n < 2) return 0.0;
  std::vector<std::size_t> scratch(n);
  const std::uint64_t discordant = count_inversions(mapped, scratch, 0, n);
  return static_cast<double>(discordant) / (static_cast<double>(n) * (n - 1) / 2.0);
}

}  // namespace insfuse
