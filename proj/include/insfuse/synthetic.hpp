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

#ifndef INSFUSE_SYNTHETIC_HPP_
#define INSFUSE_SYNTHETIC_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "insfuse/types.hpp"

namespace insfuse {

// Seeded stand-in for a detector-scored video corpus.
//
// Each video walks a chain over {background, topic 1..T}, so every shot is
// relevant to at most one topic and relevant shots form runs of mean length
// action_run_length. Relevant shots carry high-band face and action
// tracks; every other track is low band. detector_noise widens the bands
// and makes whole tracks miss; dropout_rate removes interior keyframes of
// each track independently. Features are noisy copies of one centre per
// topic (relevant shots) or of a single background centre; the centres are
// mutually orthogonal when feature_dim allows.
struct SyntheticSpec {
  std::uint64_t seed = 42;
  int videos = 4;
  int shots_per_video = 50;
  int keyframes_per_shot = 8;
  int persons = 6;
  int actions = 5;
  int topics = 4;
  double relevance_rate = 0.15;
  double detector_noise = 0.3;
  double dropout_rate = 0.3;
  int feature_dim = 32;
  double feature_noise = 0.8;
  double action_run_length = 3.0;
  // Independent action-detector variants (one detection table each).
  int variants = 1;
};

// Throws std::invalid_argument when a count is < 1, a rate is outside
// [0,1], action_run_length < 1, or topics exceed persons * actions.
void validate(const SyntheticSpec& spec);

struct SyntheticDataset {
  std::vector<DetectionTable> detections;  // one per variant
  ShotIndexTable shots;
  std::vector<Topic> topics;
  FeatureTable features;
  Qrels qrels;
};

SyntheticDataset generate_synthetic(const SyntheticSpec& spec);

// detections.tsv (variant 0), detections.<i>.tsv for further variants,
// shots.tsv, topics.tsv, features.tsv, qrels.txt.
void write_dataset(const SyntheticDataset& dataset, const std::filesystem::path& dir);

// generate_synthetic followed by write_dataset.
SyntheticDataset synth_generate(const SyntheticSpec& spec, const std::filesystem::path& dir);

std::filesystem::path variant_detections_path(const std::filesystem::path& dir, int variant);

}  // namespace insfuse

#endif  // INSFUSE_SYNTHETIC_HPP_
