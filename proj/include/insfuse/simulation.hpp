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

#ifndef INSFUSE_SIMULATION_HPP_
#define INSFUSE_SIMULATION_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "insfuse/feedback.hpp"
#include "insfuse/types.hpp"

namespace insfuse {

// Oracle-driven feedback rounds for desk experiments.

enum class FeedbackKind { kTopK, kCaaf };

std::string_view to_string(FeedbackKind kind);
std::optional<FeedbackKind> parse_feedback_kind(std::string_view text);

struct FeedbackSettings {
  FeedbackKind kind = FeedbackKind::kTopK;
  TopKStrategy topk;
  CaafParams caaf;
  int rounds = 5;
};

struct CurvePoint {
  int round = 0;
  std::size_t labels_used = 0;
  std::optional<double> ap;  // absent when the topic has no relevant shot
};

struct SimulationResult {
  Ranking ranking;
  std::vector<CurvePoint> curve;  // round 0 is the input ranking
};

// Top-K: each round reviews the first k unreviewed shots of the current
// ranking and rearranges the input ranking with every label so far.
// CAAF: each round labels caaf_recommend(batch) shots, applies them, runs
// one caaf_step and re-ranks. `features` is required for CAAF.
SimulationResult simulate_feedback(const Ranking& ranking, const Qrels& qrels,
                                   const FeatureTable* features,
                                   const FeedbackSettings& settings,
                                   std::size_t depth = 1000);

}  // namespace insfuse

#endif  // INSFUSE_SIMULATION_HPP_
