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

#ifndef INSFUSE_TYPES_HPP_
#define INSFUSE_TYPES_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace insfuse {

using Keyframe = std::int64_t;

// Axis-aligned rectangle in pixels, (x1, y1) top-left and (x2, y2) bottom-right.
struct Box {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  bool valid() const { return x1 < x2 && y1 < y2; }

  friend bool operator==(const Box&, const Box&) = default;
};

enum class EntityKind { kPerson, kAction };

std::string_view to_string(EntityKind kind);
std::optional<EntityKind> parse_entity_kind(std::string_view text);

struct DetectionRecord {
  std::string video_id;
  std::string shot_id;
  Keyframe keyframe = 0;
  EntityKind entity_kind = EntityKind::kPerson;
  std::string entity_id;
  double confidence = 0.0;
  std::optional<Box> box;
  // Set on records produced by interpolation; never written to files.
  bool synthetic = false;

  friend bool operator==(const DetectionRecord&, const DetectionRecord&) = default;
};

using DetectionTable = std::vector<DetectionRecord>;

// Identifies one detection track: the same entity inside one shot.
struct TrackKey {
  std::string video_id;
  std::string shot_id;
  EntityKind entity_kind = EntityKind::kPerson;
  std::string entity_id;

  friend auto operator<=>(const TrackKey&, const TrackKey&) = default;
};

TrackKey track_key(const DetectionRecord& record);

struct ShotIndex {
  std::string video_id;
  std::string shot_id;
  std::int64_t ordinal = 0;
  Keyframe keyframe_start = 0;
  Keyframe keyframe_end = 0;

  friend bool operator==(const ShotIndex&, const ShotIndex&) = default;
};

// Shot ordering per video. Construction enforces unique shot ids and
// ordinals 0..n-1 within each video; throws ValidationError otherwise.
class ShotIndexTable {
 public:
  ShotIndexTable() = default;
  explicit ShotIndexTable(std::vector<ShotIndex> shots);

  const std::vector<ShotIndex>& shots() const { return shots_; }
  std::size_t size() const { return shots_.size(); }

  const ShotIndex* find(std::string_view shot_id) const;
  // Shot at `ordinal` in `video_id`, or nullptr when out of range.
  const ShotIndex* at_ordinal(std::string_view video_id, std::int64_t ordinal) const;
  std::int64_t video_length(std::string_view video_id) const;

 private:
  std::vector<ShotIndex> shots_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> by_video_;
};

struct Topic {
  std::string topic_id;
  std::string person_id;
  std::string action_id;

  friend bool operator==(const Topic&, const Topic&) = default;
};

struct RankedShot {
  std::string shot_id;
  double score = 0.0;

  friend bool operator==(const RankedShot&, const RankedShot&) = default;
};

inline constexpr std::string_view kDefaultRunTag = "insfuse";

struct Ranking {
  std::string topic_id;
  std::vector<RankedShot> entries;
  std::string run_tag{kDefaultRunTag};

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }

  friend bool operator==(const Ranking&, const Ranking&) = default;
};

// Throws ValidationError unless scores are finite and non-increasing and
// shot ids are unique.
void validate_ranking(const Ranking& ranking);

// Sorts by descending score, ties by ascending shot id.
void sort_entries(std::vector<RankedShot>& entries);

// shot_id -> unit-norm vector of a common dimension.
class FeatureTable {
 public:
  FeatureTable() = default;

  // Renormalizes `values` to unit length. Throws ValidationError on a
  // duplicate id, a dimension mismatch, or a zero vector.
  void insert(std::string shot_id, std::vector<double> values);

  const std::vector<double>* find(std::string_view shot_id) const;
  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return vectors_.size(); }
  const std::map<std::string, std::vector<double>, std::less<>>& vectors() const {
    return vectors_;
  }

 private:
  std::size_t dimension_ = 0;
  std::map<std::string, std::vector<double>, std::less<>> vectors_;
};

// Binary relevance judgments. Unjudged pairs read as non-relevant.
class Qrels {
 public:
  // Throws ValidationError on a repeated (topic, shot) pair or rel not in {0,1}.
  void set(const std::string& topic_id, const std::string& shot_id, int relevance);

  int relevance(std::string_view topic_id, std::string_view shot_id) const;
  bool judged(std::string_view topic_id, std::string_view shot_id) const;
  std::size_t relevant_count(std::string_view topic_id) const;
  std::vector<std::string> topics() const;
  const std::map<std::string, int, std::less<>>* judgments(std::string_view topic_id) const;

 private:
  std::map<std::string, std::map<std::string, int, std::less<>>, std::less<>> judgments_;
};

}  // namespace insfuse

#endif  // INSFUSE_TYPES_HPP_
