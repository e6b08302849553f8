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

#include "insfuse/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "insfuse/errors.hpp"

namespace insfuse {

std::string_view to_string(Polarity polarity) {
  return polarity == Polarity::kPositive ? "positive" : "negative";
}

std::optional<Polarity> parse_polarity(std::string_view text) {
  if (text == "positive") return Polarity::kPositive;
  if (text == "negative") return Polarity::kNegative;
  return std::nullopt;
}

void add_labels(LabelSet& set, std::span<const Label> labels) {
  for (const Label& label : labels) set.insert_or_assign(label.shot_id, label.polarity);
}

std::string_view to_string(TopKMode mode) {
  switch (mode) {
    case TopKMode::kPositiveOnly:
      return "positive_only";
    case TopKMode::kNegativeOnly:
      return "negative_only";
    case TopKMode::kBoth:
      break;
  }
  return "both";
}

std::optional<TopKMode> parse_topk_mode(std::string_view text) {
  if (text == "positive_only") return TopKMode::kPositiveOnly;
  if (text == "negative_only") return TopKMode::kNegativeOnly;
  if (text == "both") return TopKMode::kBoth;
  return std::nullopt;
}

Ranking topk_rearrange(const Ranking& ranking, const LabelSet& labels,
                       const TopKStrategy& strategy) {
  if (strategy.k < 1) throw std::invalid_argument("top-k strategy needs k >= 1");
  std::unordered_set<std::string_view> known;
  for (const RankedShot& entry : ranking.entries) known.insert(entry.shot_id);
  for (const auto& [shot, polarity] : labels) {
    if (!known.contains(shot)) throw std::invalid_argument("label for unknown shot " + shot);
  }

  auto effective = [&](std::string_view shot) -> std::optional<Polarity> {
    auto it = labels.find(shot);
    if (it == labels.end()) return std::nullopt;
    if (it->second == Polarity::kPositive && strategy.mode == TopKMode::kNegativeOnly) {
      return std::nullopt;
    }
    if (it->second == Polarity::kNegative && strategy.mode == TopKMode::kPositiveOnly) {
      return std::nullopt;
    }
    return it->second;
  };

  std::vector<std::string> positives, unlabeled, negatives;
  for (const RankedShot& entry : ranking.entries) {
    const auto polarity = effective(entry.shot_id);
    if (!polarity) {
      unlabeled.push_back(entry.shot_id);
    } else if (*polarity == Polarity::kPositive) {
      positives.push_back(entry.shot_id);
    } else {
      negatives.push_back(entry.shot_id);
    }
  }
  if (positives.empty() && negatives.empty()) return ranking;

  Ranking out{ranking.topic_id, {}, ranking.run_tag};
  const double n = static_cast<double>(ranking.entries.size());
  out.entries.reserve(ranking.entries.size());
  for (auto* group : {&positives, &unlabeled, &negatives}) {
    for (std::string& shot : *group) {
      const double rank = static_cast<double>(out.entries.size());
      out.entries.push_back(RankedShot{std::move(shot), 1.0 - rank / n});
    }
  }
  return out;
}

std::vector<std::string> topk_candidates(const Ranking& ranking, const LabelSet& labels,
                                         std::size_t k) {
  std::vector<std::string> out;
  for (const RankedShot& entry : ranking.entries) {
    if (out.size() >= k) break;
    if (!labels.contains(entry.shot_id)) out.push_back(entry.shot_id);
  }
  return out;
}

void validate(const CaafParams& params) {
  if (params.a_probe <= 10) throw std::invalid_argument("a_probe must be > 10");
  if (params.n_gallery < params.a_probe) {
    throw std::invalid_argument("n_gallery must be >= a_probe");
  }
  if (!(params.lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  if (params.batch < 1) throw std::invalid_argument("batch must be >= 1");
  if (params.max_sweeps < 1) throw std::invalid_argument("max_sweeps must be >= 1");
  if (!(params.tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  if (params.beta && !std::isfinite(*params.beta)) {
    throw std::invalid_argument("beta must be finite");
  }
}

std::optional<std::size_t> CaafState::index_of(std::string_view shot_id) const {
  for (std::size_t i = 1; i < ids.size(); ++i) {
    if (ids[i] == shot_id) return i;
  }
  return std::nullopt;
}

bool CaafState::is_labeled(std::size_t i) const { return i > 0 && labels.contains(ids[i]); }

CaafState caaf_init(const Ranking& ranking, const FeatureTable& features,
                    const CaafParams& params) {
  validate(params);
  if (ranking.entries.empty()) throw std::invalid_argument("caaf_init: empty ranking");

  const std::size_t gallery = std::min(params.n_gallery, ranking.entries.size());
  std::vector<const std::vector<double>*> vectors;
  std::string missing;
  for (std::size_t i = 0; i < gallery; ++i) {
    const auto* x = features.find(ranking.entries[i].shot_id);
    if (x == nullptr) missing += (missing.empty() ? "" : ", ") + ranking.entries[i].shot_id;
    vectors.push_back(x);
  }
  if (!missing.empty()) throw ValidationError("caaf_init: missing features for " + missing);

  const std::size_t dim = features.dimension();
  const std::size_t top = std::min(params.a_probe, gallery);
  std::vector<double> probe(dim, 0.0);
  for (std::size_t i = 0; i < top; ++i) {
    for (std::size_t d = 0; d < dim; ++d) probe[d] += (*vectors[i])[d];
  }
  double norm = 0.0;
  for (double x : probe) norm += x * x;
  norm = std::sqrt(norm);
  if (!(norm > 0.0)) throw NumericError("caaf_init: probe feature has zero norm");
  for (double& x : probe) x /= norm;
  vectors.insert(vectors.begin(), &probe);

  CaafState state;
  state.topic_id = ranking.topic_id;
  state.run_tag = ranking.run_tag;
  state.lambda = params.lambda;
  state.max_sweeps = params.max_sweeps;
  state.tol = params.tol;
  const std::size_t m = gallery + 1;
  state.ids.reserve(m);
  state.ids.emplace_back(kProbeId);
  for (std::size_t i = 0; i < gallery; ++i) state.ids.push_back(ranking.entries[i].shot_id);
  for (std::size_t i = gallery; i < ranking.entries.size(); ++i) {
    state.tail.push_back(ranking.entries[i].shot_id);
  }

  auto affinity = std::make_shared<std::vector<double>>(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      double dot = 0.0;
      for (std::size_t d = 0; d < dim; ++d) dot += (*vectors[i])[d] * (*vectors[j])[d];
      const double w = std::clamp(dot, 0.0, 1.0);
      (*affinity)[i * m + j] = w;
      (*affinity)[j * m + i] = w;
    }
  }
  state.affinity = std::move(affinity);

  double lo = ranking.entries[0].score;
  double hi = ranking.entries[0].score;
  for (std::size_t i = 0; i < gallery; ++i) {
    lo = std::min(lo, ranking.entries[i].score);
    hi = std::max(hi, ranking.entries[i].score);
  }
  state.f.resize(m);
  state.f[0] = 1.0;
  for (std::size_t i = 0; i < gallery; ++i) {
    state.f[i + 1] = hi > lo ? (ranking.entries[i].score - lo) / (hi - lo) : 0.5;
  }
  state.v.assign(m, 0.5);
  state.v[0] = 1.0;
  state.v0 = state.v;
  state.clamp.assign(m, std::nullopt);
  state.clamp[0] = 1.0;

  if (params.beta) {
    state.beta = *params.beta;
  } else if (m > 1) {
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) total += caaf_pairwise_loss(state, i, j);
    }
    state.beta = total / (static_cast<double>(m) * static_cast<double>(m - 1) / 2.0);
  }
  return state;
}

double caaf_pairwise_loss(const CaafState& state, std::size_t i, std::size_t j) {
  const double d = state.f[i] - state.f[j];
  return state.w(i, j) * d * d;
}

double caaf_energy(const CaafState& state) {
  const std::size_t m = state.size();
  const double md = static_cast<double>(m);
  double pairwise = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      pairwise += (state.v[i] + state.v[j]) * (caaf_pairwise_loss(state, i, j) - state.beta);
    }
  }
  double penalty = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double d = state.v[i] - state.v0[i];
    penalty += d * d;
  }
  // Each unordered pair appears twice in the ordered sum.
  return 2.0 * pairwise / (md * md) + state.lambda / md * penalty;
}

CaafState caaf_step(const CaafState& state) {
  CaafState next = state;
  const std::size_t m = next.size();
  const double md = static_cast<double>(m);

  for (int sweep = 0; sweep < next.max_sweeps; ++sweep) {
    double change = 0.0;
    for (std::size_t i = 1; i < m; ++i) {
      if (next.clamp[i]) continue;
      double num = 0.0;
      double den = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        if (j == i) continue;
        const double weight = (next.v[i] + next.v[j]) * next.w(i, j);
        num += weight * next.f[j];
        den += weight;
      }
      if (den <= 0.0) continue;
      const double value = num / den;
      if (!std::isfinite(value)) throw NumericError("caaf_step: non-finite ranking score");
      change = std::max(change, std::abs(value - next.f[i]));
      next.f[i] = value;
    }
    if (change < next.tol) break;
  }

  for (std::size_t i = 1; i < m; ++i) {
    if (next.is_labeled(i)) continue;
    double excess = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (j != i) excess += caaf_pairwise_loss(next, i, j) - next.beta;
    }
    const double value = next.v0[i] - excess / (next.lambda * md);
    if (!std::isfinite(value)) throw NumericError("caaf_step: non-finite confidence");
    next.v[i] = std::clamp(value, 0.0, 1.0);
  }
  return next;
}

std::vector<std::string> caaf_recommend(const CaafState& state, std::size_t batch) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 1; i < state.size(); ++i) {
    if (!state.is_labeled(i)) pool.push_back(i);
  }
  std::sort(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) {
    if (state.v[a] != state.v[b]) return state.v[a] > state.v[b];
    if (state.f[a] != state.f[b]) return state.f[a] > state.f[b];
    return state.ids[a] < state.ids[b];
  });
  if (pool.size() > batch) pool.resize(batch);
  std::vector<std::string> out;
  out.reserve(pool.size());
  for (std::size_t i : pool) out.push_back(state.ids[i]);
  return out;
}

CaafState apply_label(const CaafState& state, const Label& label) {
  const auto index = state.index_of(label.shot_id);
  if (!index) throw std::invalid_argument("label for shot outside the gallery: " + label.shot_id);
  CaafState next = state;
  const std::size_t i = *index;
  next.labels.insert_or_assign(label.shot_id, label.polarity);
  next.v[i] = 1.0;
  next.v0[i] = 1.0;
  next.clamp[i] = label.polarity == Polarity::kPositive ? 1.0 : 0.0;
  next.f[i] = *next.clamp[i];
  return next;
}

Ranking caaf_ranking(const CaafState& state) {
  std::vector<std::size_t> order(state.size() - 1);
  std::iota(order.begin(), order.end(), std::size_t{1});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return state.f[a] > state.f[b]; });
  Ranking out{state.topic_id, {}, state.run_tag};
  out.entries.reserve(order.size() + state.tail.size());
  for (std::size_t i : order) out.entries.push_back(RankedShot{state.ids[i], state.f[i]});
  const double floor = out.entries.empty() ? 0.0 : out.entries.back().score;
  const double step = 1.0 / static_cast<double>(state.tail.size() + 1);
  for (std::size_t t = 0; t < state.tail.size(); ++t) {
    out.entries.push_back(RankedShot{state.tail[t], floor - static_cast<double>(t + 1) * step});
  }
  return out;
}

std::vector<Label> oracle_annotate(const Qrels& qrels, std::string_view topic_id,
                                   std::span<const std::string> shots) {
  std::vector<Label> labels;
  labels.reserve(shots.size());
  for (const std::string& shot : shots) {
    labels.push_back(Label{shot, qrels.relevance(topic_id, shot) == 1 ? Polarity::kPositive
                                                                      : Polarity::kNegative});
  }
  return labels;
}

}  // namespace insfuse
