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

#ifndef INSFUSE_PIPELINE_HPP_
#define INSFUSE_PIPELINE_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "insfuse/detection_extension.hpp"
#include "insfuse/fusion.hpp"
#include "insfuse/rank_aggregation.hpp"
#include "insfuse/simulation.hpp"
#include "insfuse/temporal_extension.hpp"
#include "insfuse/types.hpp"

namespace insfuse {

// A stage failed; what() is "<stage>[ topic <id>]: <cause>".
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, std::string topic, const std::string& cause)
      : std::runtime_error(stage + (topic.empty() ? "" : " topic " + topic) + ": " + cause),
        stage_(std::move(stage)),
        topic_(std::move(topic)) {}

  const std::string& stage() const { return stage_; }
  const std::string& topic() const { return topic_; }

 private:
  std::string stage_;
  std::string topic_;
};

struct StageToggles {
  bool ide = false;
  bool icv = false;
  bool ste = false;
  bool aggregate = false;
  bool feedback = false;
};

struct PipelineSettings {
  StageToggles stages;
  FusionParams fusion;
  IdeParams ide;
  SteParams ste;
  HqParams hq;
  FeedbackSettings feedback;
  std::string run_tag{kDefaultRunTag};
  std::size_t depth = 1000;
};

// One detection table per action-detector variant; aggregation fuses the
// per-variant rankings.
struct PipelineInputs {
  std::vector<DetectionTable> variants;
  ShotIndexTable shots;
  std::vector<Topic> topics;
};

struct TopicAggregation {
  std::string topic_id;
  std::vector<double> alphas;
  int iterations = 0;
  bool converged = false;
};

struct PipelineRuns {
  std::vector<std::vector<Ranking>> fused;  // [variant][topic]
  std::vector<std::vector<Ranking>> ste;    // [variant][topic]; empty when STE is off
  std::vector<Ranking> automatic;           // output of the automatic stages
  std::vector<TopicAggregation> aggregation;
  std::vector<Ranking> final;               // automatic, or feedback output
  std::vector<std::string> warnings;
};

// Throws std::invalid_argument when the toggles are inconsistent with the
// inputs (aggregation needs >= 2 variants).
void validate(const PipelineSettings& settings, std::size_t variants);

// IDE -> fuse -> STE -> aggregate on in-memory inputs. Feedback needs qrels
// (and features for CAAF); pass them only when stages.feedback is set.
// Throws StageError.
PipelineRuns run_stages(const PipelineInputs& inputs, const PipelineSettings& settings,
                        const Qrels* qrels = nullptr, const FeatureTable* features = nullptr);

struct PipelineConfig {
  PipelineSettings settings;
  std::vector<std::filesystem::path> detections;
  std::filesystem::path shots;
  std::filesystem::path topics;
  std::optional<std::filesystem::path> qrels;
  std::optional<std::filesystem::path> features;
  std::filesystem::path output_dir = "out";
};

// JSON config. Relative input/output paths resolve against `base_dir`.
// Every knob has a default; unknown keys are rejected.
PipelineConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const PipelineConfig& config);

struct PipelineReport {
  std::vector<std::filesystem::path> written;
  std::optional<double> map;  // final mAP when qrels are configured
  std::string json;
};

// Loads inputs, runs the stages, and writes config.json, one run file per
// stage (fused.<v>.run, ste.<v>.run, automatic.run, final.run) and
// report.json into output_dir. Failures surface as StageError.
PipelineReport run_pipeline(const PipelineConfig& config);

}  // namespace insfuse

#endif  // INSFUSE_PIPELINE_HPP_
