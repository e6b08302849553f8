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

#include "insfuse/detection_extension.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

#include "insfuse/errors.hpp"

namespace insfuse {
namespace {

void check_params(const IdeParams& params) {
  if (params.max_gap < 2) throw std::invalid_argument("max_gap must be >= 2");
}

// Track key -> indices into the table, sorted by keyframe.
std::map<TrackKey, std::vector<std::size_t>> group_tracks(const DetectionTable& table) {
  std::map<TrackKey, std::vector<std::size_t>> tracks;
  for (std::size_t i = 0; i < table.size(); ++i) tracks[track_key(table[i])].push_back(i);
  for (auto& [key, indices] : tracks) {
    std::stable_sort(indices.begin(), indices.end(), [&table](std::size_t a, std::size_t b) {
      return table[a].keyframe < table[b].keyframe;
    });
  }
  return tracks;
}

double lerp(double left, double right, double wl, double wr) {
  const double value = wl * left + wr * right;
  return std::clamp(value, std::min(left, right), std::max(left, right));
}

}  // namespace

void check_consistency(const DetectionTable& table, const ShotIndexTable& shots) {
  for (const DetectionRecord& r : table) {
    const ShotIndex* shot = shots.find(r.shot_id);
    if (shot == nullptr) {
      throw ConsistencyError("detection references unknown shot " + r.shot_id);
    }
    if (shot->video_id != r.video_id) {
      throw ConsistencyError("shot " + r.shot_id + " belongs to video " + shot->video_id +
                             ", detection says " + r.video_id);
    }
    if (r.keyframe < shot->keyframe_start || r.keyframe > shot->keyframe_end) {
      throw ConsistencyError("keyframe " + std::to_string(r.keyframe) + " outside shot " +
                             r.shot_id + " range [" + std::to_string(shot->keyframe_start) +
                             ", " + std::to_string(shot->keyframe_end) + "]");
    }
  }
}

std::vector<Gap> find_gaps(const DetectionTable& table, const ShotIndexTable& shots,
                           const IdeParams& params) {
  check_params(params);
  check_consistency(table, shots);
  std::vector<Gap> gaps;
  for (const auto& [key, indices] : group_tracks(table)) {
    for (std::size_t i = 1; i < indices.size(); ++i) {
      const Keyframe left = table[indices[i - 1]].keyframe;
      const Keyframe right = table[indices[i]].keyframe;
      const Keyframe span = right - left;
      if (span >= 2 && span <= params.max_gap) gaps.push_back(Gap{key, left, right});
    }
  }
  return gaps;
}

DetectionRecord interpolate_gap(const DetectionRecord& left, const DetectionRecord& right,
                                Keyframe k) {
  if (track_key(left) != track_key(right)) {
    throw std::invalid_argument("interpolate_gap: endpoints belong to different tracks");
  }
  if (!(left.keyframe < k && k < right.keyframe)) {
    throw std::invalid_argument("interpolate_gap: keyframe " + std::to_string(k) +
                                " not strictly between " + std::to_string(left.keyframe) +
                                " and " + std::to_string(right.keyframe));
  }
  const double m = static_cast<double>(k - left.keyframe);
  const double n = static_cast<double>(right.keyframe - k);
  const double wl = n / (m + n);
  const double wr = m / (m + n);

  DetectionRecord out = left;
  out.keyframe = k;
  out.synthetic = true;
  out.confidence = lerp(left.confidence, right.confidence, wl, wr);
  if (left.box && right.box) {
    const Box& a = *left.box;
    const Box& b = *right.box;
    out.box = Box{lerp(a.x1, b.x1, wl, wr), lerp(a.y1, b.y1, wl, wr), lerp(a.x2, b.x2, wl, wr),
                  lerp(a.y2, b.y2, wl, wr)};
  } else {
    out.box.reset();
  }
  return out;
}

DetectionTable apply_ide(const DetectionTable& table, const ShotIndexTable& shots,
                         const IdeParams& params) {
  check_params(params);
  check_consistency(table, shots);
  DetectionTable out;
  out.reserve(table.size());
  for (const auto& [key, indices] : group_tracks(table)) {
    for (std::size_t i = 0; i < indices.size(); ++i) {
      if (i > 0) {
        const DetectionRecord& left = table[indices[i - 1]];
        const DetectionRecord& right = table[indices[i]];
        const Keyframe span = right.keyframe - left.keyframe;
        if (span >= 2 && span <= params.max_gap) {
          for (Keyframe k = left.keyframe + 1; k < right.keyframe; ++k) {
            out.push_back(interpolate_gap(left, right, k));
          }
        }
      }
      out.push_back(table[indices[i]]);
    }
  }
  return out;
}

}  // namespace insfuse
