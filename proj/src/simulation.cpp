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

#include "insfuse/simulation.hpp"

#include <stdexcept>

#include "insfuse/evaluation.hpp"

namespace insfuse {
namespace {

std::optional<double> maybe_ap(const Ranking& ranking, const Qrels& qrels, std::size_t depth) {
  if (qrels.relevant_count(ranking.topic_id) == 0) return std::nullopt;
  return average_precision(ranking, qrels, depth);
}

}  // namespace

std::string_view to_string(FeedbackKind kind) {
  return kind == FeedbackKind::kTopK ? "topk" : "caaf";
}

std::optional<FeedbackKind> parse_feedback_kind(std::string_view text) {
  if (text == "topk") return FeedbackKind::kTopK;
  if (text == "caaf") return FeedbackKind::kCaaf;
  return std::nullopt;
}

SimulationResult simulate_feedback(const Ranking& ranking, const Qrels& qrels,
                                   const FeatureTable* features,
                                   const FeedbackSettings& settings, std::size_t depth) {
  if (settings.rounds < 0) throw std::invalid_argument("rounds must be >= 0");
  SimulationResult result{ranking, {}};
  result.curve.push_back(CurvePoint{0, 0, maybe_ap(ranking, qrels, depth)});
  if (ranking.entries.empty()) return result;

  if (settings.kind == FeedbackKind::kTopK) {
    LabelSet labels;
    for (int round = 1; round <= settings.rounds; ++round) {
      const auto shots = topk_candidates(result.ranking, labels, settings.topk.k);
      const auto batch = oracle_annotate(qrels, ranking.topic_id, shots);
      add_labels(labels, batch);
      result.ranking = topk_rearrange(ranking, labels, settings.topk);
      result.curve.push_back(
          CurvePoint{round, labels.size(), maybe_ap(result.ranking, qrels, depth)});
    }
    return result;
  }

  if (features == nullptr) throw std::invalid_argument("CAAF simulation needs features");
  CaafState state = caaf_init(ranking, *features, settings.caaf);
  for (int round = 1; round <= settings.rounds; ++round) {
    const auto shots = caaf_recommend(state, settings.caaf.batch);
    for (const Label& label : oracle_annotate(qrels, ranking.topic_id, shots)) {
      state = apply_label(state, label);
    }
    state = caaf_step(state);
    result.ranking = caaf_ranking(state);
    result.curve.push_back(
        CurvePoint{round, state.labels.size(), maybe_ap(result.ranking, qrels, depth)});
  }
  return result;
}

}  // namespace insfuse
