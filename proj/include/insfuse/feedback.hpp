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

#ifndef INSFUSE_FEEDBACK_HPP_
#define INSFUSE_FEEDBACK_HPP_

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "insfuse/types.hpp"

namespace insfuse {

enum class Polarity { kPositive, kNegative };

std::string_view to_string(Polarity polarity);
std::optional<Polarity> parse_polarity(std::string_view text);

struct Label {
  std::string shot_id;
  Polarity polarity = Polarity::kPositive;

  friend bool operator==(const Label&, const Label&) = default;
};

// shot_id -> polarity; a later label for the same shot overwrites.
using LabelSet = std::map<std::string, Polarity, std::less<>>;

void add_labels(LabelSet& set, std::span<const Label> labels);

// ---- Top-K feedback ----

enum class TopKMode { kPositiveOnly, kNegativeOnly, kBoth };

std::string_view to_string(TopKMode mode);
std::optional<TopKMode> parse_topk_mode(std::string_view text);

struct TopKStrategy {
  TopKMode mode = TopKMode::kBoth;
  std::size_t k = 100;
};

// Positives first, then unlabeled shots, then negatives, each group in its
// original order. Labels of the polarity the mode ignores are treated as
// unlabeled. Scores become 1 - rank/N. Returns the input unchanged when no
// label takes effect. Throws std::invalid_argument for a label on a shot not
// in the ranking.
Ranking topk_rearrange(const Ranking& ranking, const LabelSet& labels,
                       const TopKStrategy& strategy);

// The first `k` shots of `ranking` that carry no label.
std::vector<std::string> topk_candidates(const Ranking& ranking, const LabelSet& labels,
                                         std::size_t k);

// ---- CAAF: confidence-aware active feedback ----
//
// Elements are the probe (index 0) and the top-N gallery shots. The energy
//
//   E(f, v) = 1/m^2 * sum_{i != j} (v_i + v_j) (l_ij - beta)
//           + lambda/m * sum_i (v_i - v0_i)^2,      l_ij = W_ij (f_i - f_j)^2
//
// is minimized by alternating exact coordinate steps over f (free
// coordinates only) and v.

struct CaafParams {
  std::size_t a_probe = 20;
  std::size_t n_gallery = 1000;
  std::optional<double> beta;  // nullopt: mean pairwise loss at init
  double lambda = 1.0;
  std::size_t batch = 5;
  int max_sweeps = 50;
  double tol = 1e-6;
};

// Throws std::invalid_argument unless a_probe > 10, n_gallery >= a_probe,
// lambda > 0, batch >= 1, max_sweeps >= 1 and tol > 0.
void validate(const CaafParams& params);

inline constexpr std::string_view kProbeId = "<probe>";

struct CaafState {
  std::string topic_id;
  std::string run_tag{kDefaultRunTag};
  std::vector<std::string> ids;  // ids[0] is the probe
  std::vector<double> f;
  std::vector<double> v;
  std::vector<double> v0;
  // m x m symmetric affinities, zero diagonal; shared between snapshots.
  std::shared_ptr<const std::vector<double>> affinity;
  // Clamped ranking score per element; the probe is clamped to 1.
  std::vector<std::optional<double>> clamp;
  LabelSet labels;
  double beta = 0.0;
  double lambda = 1.0;
  int max_sweeps = 50;
  double tol = 1e-6;
  // Shots of the input ranking past the gallery window, in input order.
  std::vector<std::string> tail;

  std::size_t size() const { return ids.size(); }
  double w(std::size_t i, std::size_t j) const { return (*affinity)[i * ids.size() + j]; }
  std::optional<std::size_t> index_of(std::string_view shot_id) const;
  bool is_labeled(std::size_t i) const;
};

// Throws std::invalid_argument for an empty ranking or invalid params, and
// ValidationError listing every gallery shot without a feature.
CaafState caaf_init(const Ranking& ranking, const FeatureTable& features,
                    const CaafParams& params);

double caaf_pairwise_loss(const CaafState& state, std::size_t i, std::size_t j);
double caaf_energy(const CaafState& state);

// f-step (Gauss-Seidel, free coordinates) followed by the v-step
//   v_i = clip(v0_i - 1/(lambda m) * sum_{j != i} (l_ij - beta), 0, 1)
// over unlabeled gallery elements; labeled elements and the probe keep v = 1.
// Throws NumericError on a non-finite value.
CaafState caaf_step(const CaafState& state);

// Unlabeled gallery shots by descending v, then descending f, then shot id.
std::vector<std::string> caaf_recommend(const CaafState& state, std::size_t batch);

// Throws std::invalid_argument when the shot is not in the gallery.
CaafState apply_label(const CaafState& state, const Label& label);

// Gallery by descending f (ties keep input order) with score f, followed by
// the tail in input order with scores strictly below the gallery minimum.
Ranking caaf_ranking(const CaafState& state);

// ---- simulated annotator ----

// Positive iff qrels marks (topic, shot) relevant; unjudged shots are negative.
std::vector<Label> oracle_annotate(const Qrels& qrels, std::string_view topic_id,
                                   std::span<const std::string> shots);

}  // namespace insfuse

#endif  // INSFUSE_FEEDBACK_HPP_
