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

#ifndef INSFUSE_TEMPORAL_EXTENSION_HPP_
#define INSFUSE_TEMPORAL_EXTENSION_HPP_

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>

#include "insfuse/types.hpp"

namespace insfuse {

struct SteParams {
  double theta = 0.5;
  double sigma = 2.0;
  int p = 3;  // neighbours at offsets -p < m < p
  // Topics that receive diffusion; nullopt enables every topic.
  std::optional<std::set<std::string>> enabled_topics;

  bool enabled_for(std::string_view topic_id) const;
};

// exp(-m^2 / sigma)
double distance_weight(long m, double sigma);

using ScoreMap = std::unordered_map<std::string, double>;

// Diffused score of one shot given the original scores of all shots
// (absent shots read as 0):
//   s + theta * sum_{-p<m<p, m!=0} w(m) * max(s[k+m] - s, 0)
// Throws ConsistencyError when the shot is not in the index.
double diffused_score(std::string_view shot_id, const ScoreMap& original,
                      const ShotIndexTable& shots, const SteParams& params);

// Applies diffused_score to every ranked shot and to unranked shots of the
// same videos that gain a positive score. All reads use the original scores.
// Entries are stably re-sorted by descending score (unranked newcomers after
// the original entries before sorting), so ties keep their input order.
// Disabled topics are returned unchanged.
Ranking apply_ste(const Ranking& ranking, const ShotIndexTable& shots, const SteParams& params);

}  // namespace insfuse

#endif  // INSFUSE_TEMPORAL_EXTENSION_HPP_
