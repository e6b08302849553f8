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

#ifndef INSFUSE_FUSION_HPP_
#define INSFUSE_FUSION_HPP_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "insfuse/types.hpp"

namespace insfuse {

enum class ShotAggregation { kMax };

struct FusionParams {
  double delta = 0.5;  // face threshold
  bool icv_enabled = false;
  ShotAggregation shot_aggregation = ShotAggregation::kMax;
};

struct FusedScore {
  std::string topic_id;
  std::string shot_id;
  double score = 0.0;
  std::optional<Keyframe> best_keyframe;
};

// 1 when x >= delta, else 0.
int threshold_filter(double x, double delta);

// Fraction of the face box covered by the action box. Throws
// std::invalid_argument when the face box has no area.
double icv_weight(const Box& face_box, const Box& action_box);

// threshold_filter(face) * action confidence, scaled by icv_weight when ICV
// is enabled and both boxes are present.
double fuse_keyframe(const DetectionRecord& face, const DetectionRecord& action,
                     const FusionParams& params);

// Max pooling; 0 for no keyframes.
double shot_score(std::span<const double> keyframe_scores);

// Per gallery shot, max over queries of the dot product, clamped to [0,1].
std::map<std::string, double> cosine_scores(std::span<const std::vector<double>> queries,
                                            const FeatureTable& gallery);

// Per-shot best keyframe scores for one topic, zero scores dropped.
std::vector<FusedScore> fuse_topic_scores(const Topic& topic, const DetectionTable& detections,
                                          const ShotIndexTable& shots,
                                          const FusionParams& params,
                                          std::vector<std::string>* warnings = nullptr);

// Ranking of fuse_topic_scores, descending, ties by ascending shot id.
Ranking fuse_topic(const Topic& topic, const DetectionTable& detections,
                   const ShotIndexTable& shots, const FusionParams& params,
                   std::vector<std::string>* warnings = nullptr,
                   std::string_view run_tag = kDefaultRunTag);

}  // namespace insfuse

#endif  // INSFUSE_FUSION_HPP_
