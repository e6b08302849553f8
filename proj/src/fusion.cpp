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

#include "insfuse/fusion.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

#include "insfuse/detection_extension.hpp"
#include "insfuse/errors.hpp"

namespace insfuse {

int threshold_filter(double x, double delta) { return x >= delta ? 1 : 0; }

double icv_weight(const Box& face_box, const Box& action_box) {
  if (!face_box.valid()) throw std::invalid_argument("icv_weight: degenerate face box");
  const double w = std::min(face_box.x2, action_box.x2) - std::max(face_box.x1, action_box.x1);
  const double h = std::min(face_box.y2, action_box.y2) - std::max(face_box.y1, action_box.y1);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return std::min(1.0, (w * h) / face_box.area());
}

double fuse_keyframe(const DetectionRecord& face, const DetectionRecord& action,
                     const FusionParams& params) {
  if (face.entity_kind != EntityKind::kPerson || action.entity_kind != EntityKind::kAction) {
    throw std::invalid_argument("fuse_keyframe: expected a person and an action record");
  }
  if (face.keyframe != action.keyframe || face.shot_id != action.shot_id ||
      face.video_id != action.video_id) {
    throw std::invalid_argument("fuse_keyframe: records are on different keyframes");
  }
  double c = 1.0;
  if (params.icv_enabled && face.box && action.box) c = icv_weight(*face.box, *action.box);
  return c * threshold_filter(face.confidence, params.delta) * action.confidence;
}

double shot_score(std::span<const double> keyframe_scores) {
  if (keyframe_scores.empty()) return 0.0;
  return *std::max_element(keyframe_scores.begin(), keyframe_scores.end());
}

std::map<std::string, double> cosine_scores(std::span<const std::vector<double>> queries,
                                            const FeatureTable& gallery) {
  for (const auto& q : queries) {
    if (gallery.size() > 0 && q.size() != gallery.dimension()) {
      throw std::invalid_argument("cosine_scores: query dimension " + std::to_string(q.size()) +
                                  " does not match gallery dimension " +
                                  std::to_string(gallery.dimension()));
    }
  }
  std::map<std::string, double> scores;
  for (const auto& [shot, x] : gallery.vectors()) {
    double best = 0.0;
    for (const auto& q : queries) {
      double dot = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) dot += q[i] * x[i];
      best = std::max(best, dot);
    }
    scores.emplace(shot, std::clamp(best, 0.0, 1.0));
  }
  return scores;
}

std::vector<FusedScore> fuse_topic_scores(const Topic& topic, const DetectionTable& detections,
                                          const ShotIndexTable& shots,
                                          const FusionParams& params,
                                          std::vector<std::string>* warnings) {
  if (params.delta < 0.0 || params.delta > 1.0) {
    throw std::invalid_argument("delta must lie in [0,1]");
  }
  check_consistency(detections, shots);

  bool person_seen = false;
  bool action_seen = false;
  // (shot, keyframe) -> face and action records of this topic.
  struct Slot {
    std::vector<const DetectionRecord*> faces;
    std::vector<const DetectionRecord*> actions;
  };
  std::map<std::tuple<std::string_view, Keyframe>, Slot> slots;
  for (const DetectionRecord& r : detections) {
    if (r.entity_kind == EntityKind::kPerson && r.entity_id == topic.person_id) {
      person_seen = true;
      slots[{r.shot_id, r.keyframe}].faces.push_back(&r);
    } else if (r.entity_kind == EntityKind::kAction && r.entity_id == topic.action_id) {
      action_seen = true;
      slots[{r.shot_id, r.keyframe}].actions.push_back(&r);
    }
  }
  if (!person_seen || !action_seen) {
    if (warnings != nullptr) {
      warnings->push_back("topic " + topic.topic_id + ": no detections for " +
                          (!person_seen ? "person " + topic.person_id
                                        : "action " + topic.action_id));
    }
    return {};
  }

  std::map<std::string_view, FusedScore> best;
  for (const auto& [where, slot] : slots) {
    double keyframe_best = 0.0;
    for (const DetectionRecord* face : slot.faces) {
      for (const DetectionRecord* action : slot.actions) {
        keyframe_best = std::max(keyframe_best, fuse_keyframe(*face, *action, params));
      }
    }
    if (keyframe_best <= 0.0) continue;
    const auto& [shot_id, keyframe] = where;
    auto [it, inserted] = best.try_emplace(
        shot_id, FusedScore{topic.topic_id, std::string(shot_id), keyframe_best, keyframe});
    if (!inserted && keyframe_best > it->second.score) {
      it->second.score = keyframe_best;
      it->second.best_keyframe = keyframe;
    }
  }
  std::vector<FusedScore> out;
  out.reserve(best.size());
  for (auto& [shot, fused] : best) out.push_back(std::move(fused));
  return out;
}

Ranking fuse_topic(const Topic& topic, const DetectionTable& detections,
                   const ShotIndexTable& shots, const FusionParams& params,
                   std::vector<std::string>* warnings, std::string_view run_tag) {
  Ranking ranking{topic.topic_id, {}, std::string(run_tag)};
  for (FusedScore& s : fuse_topic_scores(topic, detections, shots, params, warnings)) {
    ranking.entries.push_back(RankedShot{std::move(s.shot_id), s.score});
  }
  sort_entries(ranking.entries);
  return ranking;
}

}  // namespace insfuse
