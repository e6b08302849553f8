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

#include <map>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "insfuse/detection_extension.hpp"
#include "insfuse/io.hpp"
#include "insfuse/synthetic.hpp"

using namespace insfuse;

namespace {

std::map<std::string, std::string> directory_bytes(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    out[entry.path().filename().string()] = read_file(entry.path());
  }
  return out;
}

}  // namespace

TEST(Synthetic, SameSeedSameBytes) {
  fixtures::TempDir a, b;
  SyntheticSpec spec;
  spec.variants = 2;
  synth_generate(spec, a.path());
  synth_generate(spec, b.path());
  const auto bytes = directory_bytes(a.path());
  EXPECT_EQ(bytes, directory_bytes(b.path()));
  EXPECT_TRUE(bytes.contains("detections.tsv"));
  EXPECT_TRUE(bytes.contains("detections.1.tsv"));
  EXPECT_TRUE(bytes.contains("shots.tsv"));
  EXPECT_TRUE(bytes.contains("topics.tsv"));
  EXPECT_TRUE(bytes.contains("features.tsv"));
  EXPECT_TRUE(bytes.contains("qrels.txt"));
}

TEST(Synthetic, DifferentSeedDifferentData) {
  SyntheticSpec a, b;
  b.seed = a.seed + 1;
  EXPECT_NE(generate_synthetic(a).detections, generate_synthetic(b).detections);
}

TEST(Synthetic, WrittenFilesLoadBack) {
  fixtures::TempDir dir;
  const SyntheticDataset data = synth_generate(SyntheticSpec{}, dir.path());
  EXPECT_EQ(load_detections_file(dir / "detections.tsv"), data.detections[0]);
  EXPECT_EQ(load_shots_file(dir / "shots.tsv").shots(), data.shots.shots());
  EXPECT_EQ(load_topics_file(dir / "topics.tsv"), data.topics);
  EXPECT_EQ(load_qrels_file(dir / "qrels.txt").topics(), data.qrels.topics());
  EXPECT_NO_THROW(check_consistency(data.detections[0], data.shots));
}

TEST(Synthetic, ZeroRelevanceMeansNoPositivesAndLowBand) {
  SyntheticSpec spec;
  spec.relevance_rate = 0.0;
  spec.detector_noise = 0.0;
  const SyntheticDataset data = generate_synthetic(spec);
  for (const auto& topic : data.topics) EXPECT_EQ(data.qrels.relevant_count(topic.topic_id), 0u);
  for (const auto& r : data.detections[0]) EXPECT_LT(r.confidence, 0.5);
}

TEST(Synthetic, NoDropoutMeansIdeIsANoOp) {
  SyntheticSpec spec;
  spec.dropout_rate = 0.0;
  const SyntheticDataset data = generate_synthetic(spec);
  const auto extended = apply_ide(data.detections[0], data.shots, IdeParams{});
  EXPECT_EQ(extended.size(), data.detections[0].size());
  for (const auto& r : extended) EXPECT_FALSE(r.synthetic);
}

TEST(Synthetic, DropoutLeavesGapsForIde) {
  const SyntheticDataset data = generate_synthetic(SyntheticSpec{});
  const auto extended = apply_ide(data.detections[0], data.shots, IdeParams{});
  EXPECT_GT(extended.size(), data.detections[0].size());
}

TEST(Synthetic, ShotRelevantToAtMostOneTopic) {
  SyntheticSpec spec;
  spec.relevance_rate = 0.2;
  const SyntheticDataset data = generate_synthetic(spec);
  std::size_t relevant = 0;
  for (const auto& shot : data.shots.shots()) {
    int count = 0;
    for (const auto& topic : data.topics) count += data.qrels.relevance(topic.topic_id, shot.shot_id);
    EXPECT_LE(count, 1);
    relevant += static_cast<std::size_t>(count);
  }
  EXPECT_GT(relevant, 0u);
}

TEST(Synthetic, RelevantRunsHaveRoughlyTheRequestedLength) {
  SyntheticSpec spec;
  spec.videos = 20;
  spec.shots_per_video = 200;
  spec.action_run_length = 4.0;
  const SyntheticDataset data = generate_synthetic(spec);
  std::size_t runs = 0, shots = 0, relevant = 0;
  for (const auto& topic : data.topics) {
    bool inside = false;
    std::string video;
    for (const auto& shot : data.shots.shots()) {
      if (shot.video_id != video) {
        inside = false;
        video = shot.video_id;
      }
      const bool rel = data.qrels.relevance(topic.topic_id, shot.shot_id) == 1;
      if (rel && !inside) ++runs;
      relevant += rel;
      inside = rel;
    }
    shots += data.shots.size();
  }
  const double mean_run = static_cast<double>(relevant) / static_cast<double>(runs);
  const double share = static_cast<double>(relevant) / static_cast<double>(shots);
  EXPECT_NEAR(mean_run, 4.0, 0.6);
  EXPECT_NEAR(share, spec.relevance_rate, 0.03);
}

TEST(Synthetic, FeaturesCoverEveryShot) {
  SyntheticSpec spec;
  spec.feature_dim = 16;
  const SyntheticDataset data = generate_synthetic(spec);
  EXPECT_EQ(data.features.size(), data.shots.size());
  EXPECT_EQ(data.features.dimension(), 16u);
}

TEST(Synthetic, InvalidSpecRejected) {
  SyntheticSpec spec;
  spec.videos = 0;
  EXPECT_THROW(validate(spec), std::invalid_argument);
  spec = SyntheticSpec{};
  spec.dropout_rate = 1.5;
  EXPECT_THROW(validate(spec), std::invalid_argument);
  spec = SyntheticSpec{};
  spec.action_run_length = 0.5;
  EXPECT_THROW(validate(spec), std::invalid_argument);
  spec = SyntheticSpec{};
  spec.topics = 31;
  EXPECT_THROW(validate(spec), std::invalid_argument);
}
