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

#ifndef INSFUSE_DETECTION_EXTENSION_HPP_
#define INSFUSE_DETECTION_EXTENSION_HPP_

#include <vector>

#include "insfuse/types.hpp"

namespace insfuse {

// Inter-frame detection extension: fills keyframes missing between two
// detections of the same track by linear interpolation.

struct IdeParams {
  // Largest right - left keyframe span that is filled.
  Keyframe max_gap = 10;
};

struct Gap {
  TrackKey track;
  Keyframe left_keyframe = 0;
  Keyframe right_keyframe = 0;

  friend bool operator==(const Gap&, const Gap&) = default;
};

// Throws ConsistencyError when a detection references an unknown shot, a
// shot of another video, or a keyframe outside its shot's range.
void check_consistency(const DetectionTable& table, const ShotIndexTable& shots);

// Maximal runs of missing keyframes between consecutive detections of a
// track with span <= max_gap, ordered by track key then keyframe.
std::vector<Gap> find_gaps(const DetectionTable& table, const ShotIndexTable& shots,
                           const IdeParams& params);

// Record at keyframe k with
//   conf = n/(m+n) * left.conf + m/(m+n) * right.conf,  m = k - left, n = right - k.
// Box coordinates use the same weights; a missing endpoint box gives no box.
DetectionRecord interpolate_gap(const DetectionRecord& left, const DetectionRecord& right,
                                Keyframe k);

// Original records plus one synthetic record per keyframe of every gap,
// sorted by (track key, keyframe).
DetectionTable apply_ide(const DetectionTable& table, const ShotIndexTable& shots,
                         const IdeParams& params);

}  // namespace insfuse

#endif  // INSFUSE_DETECTION_EXTENSION_HPP_
