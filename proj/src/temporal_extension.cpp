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

#include "insfuse/temporal_extension.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "insfuse/errors.hpp"

namespace insfuse {
namespace {

void check_params(const SteParams& params) {
  if (!(params.theta >= 0.0)) throw std::invalid_argument("theta must be >= 0");
  if (!(params.sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
  if (params.p < 1) throw std::invalid_argument("p must be >= 1");
}

double lookup(const ScoreMap& scores, const std::string& shot_id) {
  auto it = scores.find(shot_id);
  return it == scores.end() ? 0.0 : it->second;
}

}  // namespace

bool SteParams::enabled_for(std::string_view topic_id) const {
  return !enabled_topics || enabled_topics->contains(std::string(topic_id));
}

double distance_weight(long m, double sigma) {
  const double md = static_cast<double>(m);
  return std::exp(-(md * md) / sigma);
}

double diffused_score(std::string_view shot_id, const ScoreMap& original,
                      const ShotIndexTable& shots, const SteParams& params) {
  const ShotIndex* shot = shots.find(shot_id);
  if (shot == nullptr) {
    throw ConsistencyError("ranked shot " + std::string(shot_id) + " missing from shot index");
  }
  const double own = lookup(original, shot->shot_id);
  double gain = 0.0;
  for (long m = -(params.p - 1); m <= params.p - 1; ++m) {
    if (m == 0) continue;
    const ShotIndex* neighbour = shots.at_ordinal(shot->video_id, shot->ordinal + m);
    if (neighbour == nullptr) continue;
    const double diff = lookup(original, neighbour->shot_id) - own;
    if (diff > 0.0) gain += distance_weight(m, params.sigma) * diff;
  }
  return own + params.theta * gain;
}

Ranking apply_ste(const Ranking& ranking, const ShotIndexTable& shots, const SteParams& params) {
  check_params(params);
  if (!params.enabled_for(ranking.topic_id)) return ranking;

  ScoreMap original;
  original.reserve(ranking.entries.size());
  for (const RankedShot& entry : ranking.entries) original.emplace(entry.shot_id, entry.score);

  Ranking out{ranking.topic_id, {}, ranking.run_tag};
  out.entries.reserve(ranking.entries.size());
  std::set<std::pair<std::string, std::int64_t>> touched;  // (video, ordinal) of candidates
  for (const RankedShot& entry : ranking.entries) {
    out.entries.push_back(
        RankedShot{entry.shot_id, diffused_score(entry.shot_id, original, shots, params)});
    const ShotIndex* shot = shots.find(entry.shot_id);
    for (long m = -(params.p - 1); m <= params.p - 1; ++m) {
      if (m != 0 && shots.at_ordinal(shot->video_id, shot->ordinal + m) != nullptr) {
        touched.emplace(shot->video_id, shot->ordinal + m);
      }
    }
  }
  for (const auto& [video, ordinal] : touched) {
    const ShotIndex* shot = shots.at_ordinal(video, ordinal);
    if (original.contains(shot->shot_id)) continue;
    const double score = diffused_score(shot->shot_id, original, shots, params);
    if (score > 0.0) out.entries.push_back(RankedShot{shot->shot_id, score});
  }
  std::stable_sort(out.entries.begin(), out.entries.end(),
                   [](const RankedShot& a, const RankedShot& b) { return a.score > b.score; });
  return out;
}

}  // namespace insfuse
