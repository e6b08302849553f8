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

#include "insfuse/types.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "insfuse/errors.hpp"

namespace insfuse {

std::string_view to_string(EntityKind kind) {
  return kind == EntityKind::kPerson ? "person" : "action";
}

std::optional<EntityKind> parse_entity_kind(std::string_view text) {
  if (text == "person") return EntityKind::kPerson;
  if (text == "action") return EntityKind::kAction;
  return std::nullopt;
}

TrackKey track_key(const DetectionRecord& record) {
  return {record.video_id, record.shot_id, record.entity_kind, record.entity_id};
}

ShotIndexTable::ShotIndexTable(std::vector<ShotIndex> shots) : shots_(std::move(shots)) {
  for (std::size_t i = 0; i < shots_.size(); ++i) {
    const ShotIndex& shot = shots_[i];
    if (shot.keyframe_start > shot.keyframe_end) {
      throw ValidationError("shot " + shot.shot_id + ": keyframe_start > keyframe_end");
    }
    if (!by_id_.emplace(shot.shot_id, i).second) {
      throw ValidationError("duplicate shot id " + shot.shot_id);
    }
    by_video_[shot.video_id].push_back(i);
  }
  for (auto& [video, indices] : by_video_) {
    std::sort(indices.begin(), indices.end(), [this](std::size_t a, std::size_t b) {
      return shots_[a].ordinal < shots_[b].ordinal;
    });
    for (std::size_t pos = 0; pos < indices.size(); ++pos) {
      const std::int64_t ordinal = shots_[indices[pos]].ordinal;
      if (ordinal == static_cast<std::int64_t>(pos)) continue;
      if (pos > 0 && ordinal == shots_[indices[pos - 1]].ordinal) {
        throw ValidationError("video " + video + ": duplicate ordinal " +
                              std::to_string(ordinal));
      }
      throw ValidationError("video " + video + ": ordinal gap at " + std::to_string(pos));
    }
  }
}

const ShotIndex* ShotIndexTable::find(std::string_view shot_id) const {
  auto it = by_id_.find(std::string(shot_id));
  return it == by_id_.end() ? nullptr : &shots_[it->second];
}

const ShotIndex* ShotIndexTable::at_ordinal(std::string_view video_id,
                                            std::int64_t ordinal) const {
  auto it = by_video_.find(video_id);
  if (it == by_video_.end() || ordinal < 0 ||
      ordinal >= static_cast<std::int64_t>(it->second.size())) {
    return nullptr;
  }
  return &shots_[it->second[static_cast<std::size_t>(ordinal)]];
}

std::int64_t ShotIndexTable::video_length(std::string_view video_id) const {
  auto it = by_video_.find(video_id);
  return it == by_video_.end() ? 0 : static_cast<std::int64_t>(it->second.size());
}

void validate_ranking(const Ranking& ranking) {
  std::unordered_set<std::string_view> seen;
  for (std::size_t i = 0; i < ranking.entries.size(); ++i) {
    const RankedShot& entry = ranking.entries[i];
    if (!std::isfinite(entry.score)) {
      throw ValidationError("topic " + ranking.topic_id + ": non-finite score for " +
                            entry.shot_id);
    }
    if (i > 0 && entry.score > ranking.entries[i - 1].score) {
      throw ValidationError("topic " + ranking.topic_id + ": non-monotone scores at " +
                            entry.shot_id);
    }
    if (!seen.insert(entry.shot_id).second) {
      throw ValidationError("topic " + ranking.topic_id + ": duplicate shot " +
                            entry.shot_id);
    }
  }
}

void sort_entries(std::vector<RankedShot>& entries) {
  std::sort(entries.begin(), entries.end(), [](const RankedShot& a, const RankedShot& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.shot_id < b.shot_id;
  });
}

void FeatureTable::insert(std::string shot_id, std::vector<double> values) {
  if (values.empty()) throw ValidationError("feature " + shot_id + ": empty vector");
  if (dimension_ != 0 && values.size() != dimension_) {
    throw ValidationError("feature " + shot_id + ": dimension mismatch (" +
                          std::to_string(values.size()) + " vs " +
                          std::to_string(dimension_) + ")");
  }
  double norm_sq = 0.0;
  for (double x : values) norm_sq += x * x;
  const double norm = std::sqrt(norm_sq);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw ValidationError("feature " + shot_id + ": cannot normalize");
  }
  for (double& x : values) x /= norm;
  if (vectors_.contains(shot_id)) throw ValidationError("duplicate feature " + shot_id);
  dimension_ = values.size();
  vectors_.emplace(std::move(shot_id), std::move(values));
}

const std::vector<double>* FeatureTable::find(std::string_view shot_id) const {
  auto it = vectors_.find(shot_id);
  return it == vectors_.end() ? nullptr : &it->second;
}

void Qrels::set(const std::string& topic_id, const std::string& shot_id, int relevance) {
  if (relevance != 0 && relevance != 1) {
    throw ValidationError("qrels " + topic_id + "/" + shot_id + ": relevance must be 0 or 1");
  }
  if (!judgments_[topic_id].emplace(shot_id, relevance).second) {
    throw ValidationError("duplicate qrels entry " + topic_id + "/" + shot_id);
  }
}

int Qrels::relevance(std::string_view topic_id, std::string_view shot_id) const {
  auto topic = judgments_.find(topic_id);
  if (topic == judgments_.end()) return 0;
  auto it = topic->second.find(shot_id);
  return it == topic->second.end() ? 0 : it->second;
}

bool Qrels::judged(std::string_view topic_id, std::string_view shot_id) const {
  auto topic = judgments_.find(topic_id);
  return topic != judgments_.end() && topic->second.contains(shot_id);
}

std::size_t Qrels::relevant_count(std::string_view topic_id) const {
  auto topic = judgments_.find(topic_id);
  if (topic == judgments_.end()) return 0;
  return static_cast<std::size_t>(std::count_if(
      topic->second.begin(), topic->second.end(),
      [](const auto& judgment) { return judgment.second == 1; }));
}

std::vector<std::string> Qrels::topics() const {
  std::vector<std::string> ids;
  for (const auto& [topic, unused] : judgments_) ids.push_back(topic);
  return ids;
}

const std::map<std::string, int, std::less<>>* Qrels::judgments(
    std::string_view topic_id) const {
  auto topic = judgments_.find(topic_id);
  return topic == judgments_.end() ? nullptr : &topic->second;
}

}  // namespace insfuse
