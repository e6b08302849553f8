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

#include "insfuse/session.hpp"

#include <chrono>
#include <cstdio>
#include <random>

#include "insfuse/errors.hpp"
#include "insfuse/io.hpp"

namespace insfuse {
namespace {

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

bool safe_name(const std::string& name) {
  return !name.empty() && name.find('/') == std::string::npos &&
         name.find('\\') == std::string::npos && name != "." && name != "..";
}

}  // namespace

FeedbackSession::FeedbackSession(Ranking original, StrategySpec strategy,
                                 const FeatureTable* features)
    : original_(std::move(original)), strategy_(std::move(strategy)), ranking_(original_) {
  if (strategy_.kind == FeedbackKind::kCaaf) {
    if (features == nullptr) throw std::invalid_argument("CAAF session needs features");
    caaf_ = caaf_init(original_, *features, strategy_.caaf);
  } else if (strategy_.topk.k < 1) {
    throw std::invalid_argument("top-k strategy needs k >= 1");
  }
}

bool FeedbackSession::knows(const std::string& shot_id) const {
  if (caaf_) return caaf_->index_of(shot_id).has_value();
  for (const RankedShot& entry : original_.entries) {
    if (entry.shot_id == shot_id) return true;
  }
  return false;
}

FeedbackSession::Outcome FeedbackSession::post(std::span<const Label> labels) {
  Outcome outcome;
  LabelSet next_labels = labels_;
  for (const Label& label : labels) {
    if (!knows(label.shot_id)) {
      outcome.rejected.push_back(LabelRejection{label.shot_id, "unknown_shot"});
      continue;
    }
    auto it = next_labels.find(label.shot_id);
    if (it != next_labels.end() && it->second == label.polarity) continue;
    next_labels.insert_or_assign(label.shot_id, label.polarity);
    outcome.applied.push_back(label);
  }
  if (!outcome.applied.empty()) {
    if (caaf_) {
      CaafState state = *caaf_;
      for (const Label& label : outcome.applied) state = apply_label(state, label);
      state = caaf_step(state);
      ranking_ = caaf_ranking(state);
      caaf_ = std::move(state);
    } else {
      ranking_ = topk_rearrange(original_, next_labels, strategy_.topk);
    }
    labels_ = std::move(next_labels);
  }
  ++version_;
  return outcome;
}

std::vector<std::string> FeedbackSession::recommendations() const {
  if (caaf_) return caaf_recommend(*caaf_, strategy_.caaf.batch);
  return topk_candidates(ranking_, labels_, strategy_.topk.k);
}

SessionStore::Entry::Entry(SessionInfo i, FeedbackSession s)
    : info(std::move(i)),
      session(std::move(s)),
      snapshot(std::make_shared<const Ranking>(session.ranking())),
      last_post_ms(now_ms()) {}

SessionStore::SessionStore(std::filesystem::path data_dir,
                           std::optional<std::filesystem::path> assets_dir)
    : data_dir_(std::move(data_dir)), assets_dir_(std::move(assets_dir)) {}

std::filesystem::path SessionStore::data_file(const std::string& name) const {
  if (!safe_name(name)) throw ServiceError(400, "bad_request", "invalid file name: " + name);
  return data_dir_ / name;
}

std::shared_ptr<const FeatureTable> SessionStore::features(const std::string& name) {
  {
    std::shared_lock lock(mutex_);
    auto it = feature_cache_.find(name);
    if (it != feature_cache_.end()) return it->second;
  }
  const auto path = data_file(name);
  if (!std::filesystem::exists(path)) {
    throw ServiceError(422, "missing_features", "feature file not found: " + name);
  }
  auto table = std::make_shared<const FeatureTable>(load_features_file(path));
  std::unique_lock lock(mutex_);
  return feature_cache_.try_emplace(name, std::move(table)).first->second;
}

CreateResult SessionStore::create(const std::string& run, const std::string& topic_id,
                                  const StrategySpec& strategy) {
  const auto path = data_file(run);
  if (!std::filesystem::exists(path)) {
    throw ServiceError(404, "unknown_run", "run file not found: " + run);
  }
  std::vector<Ranking> rankings;
  try {
    rankings = read_run_file(path);
  } catch (const std::exception& e) {
    throw ServiceError(422, "bad_run", e.what());
  }
  const Ranking* ranking = nullptr;
  for (const Ranking& r : rankings) {
    if (r.topic_id == topic_id) ranking = &r;
  }
  if (ranking == nullptr) {
    throw ServiceError(404, "unknown_topic", "topic " + topic_id + " not in run " + run);
  }

  std::shared_ptr<const FeatureTable> table;
  if (strategy.kind == FeedbackKind::kCaaf) table = features(strategy.features);
  std::optional<FeedbackSession> session;
  try {
    session.emplace(*ranking, strategy, table.get());
  } catch (const ValidationError& e) {
    throw ServiceError(422, "missing_features", e.what());
  } catch (const std::invalid_argument& e) {
    throw ServiceError(400, "bad_request", e.what());
  }

  std::unique_lock lock(mutex_);
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  char id[40];
  std::snprintf(id, sizeof id, "s%llu-%016llx", static_cast<unsigned long long>(++counter_),
                static_cast<unsigned long long>(rng()));
  auto entry = std::make_shared<Entry>(SessionInfo{id, topic_id, run, strategy},
                                       std::move(*session));
  CreateResult result{id, entry->session.recommendations()};
  sessions_.emplace(id, std::move(entry));
  return result;
}

std::shared_ptr<SessionStore::Entry> SessionStore::find(const std::string& session_id) const {
  std::shared_lock lock(mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) {
    throw ServiceError(404, "unknown_session", "no session " + session_id);
  }
  return it->second;
}

PostResult SessionStore::post_labels(const std::string& session_id,
                                     std::span<const Label> labels) {
  const auto entry = find(session_id);
  std::lock_guard lock(entry->mutex);
  auto outcome = entry->session.post(labels);
  const std::int64_t now = now_ms();
  entry->log.push_back(LabelBatch{entry->session.version(), now,
                                  static_cast<double>(now - entry->last_post_ms) / 1000.0,
                                  outcome.applied});
  entry->last_post_ms = now;
  entry->snapshot = std::make_shared<const Ranking>(entry->session.ranking());
  return PostResult{entry->session.version(), entry->session.recommendations(),
                    std::move(outcome.rejected)};
}

RankingSnapshot SessionStore::ranking(const std::string& session_id,
                                      std::optional<std::size_t> limit) const {
  const auto entry = find(session_id);
  std::shared_ptr<const Ranking> snapshot;
  int version = 0;
  {
    std::lock_guard lock(entry->mutex);
    snapshot = entry->snapshot;
    version = entry->session.version();
  }
  RankingSnapshot out{session_id, version, *snapshot};
  if (limit && out.ranking.entries.size() > *limit) out.ranking.entries.resize(*limit);
  return out;
}

std::string SessionStore::export_run(const std::string& session_id) const {
  return write_run(ranking(session_id).ranking);
}

std::vector<LabelBatch> SessionStore::log(const std::string& session_id) const {
  const auto entry = find(session_id);
  std::lock_guard lock(entry->mutex);
  return entry->log;
}

SessionInfo SessionStore::info(const std::string& session_id) const {
  return find(session_id)->info;
}

std::optional<std::string> SessionStore::keyframe_asset(const std::string& shot_id) const {
  if (!assets_dir_ || !safe_name(shot_id)) return std::nullopt;
  const auto path = *assets_dir_ / (shot_id + ".jpg");
  if (!std::filesystem::is_regular_file(path)) return std::nullopt;
  return read_file(path);
}

}  // namespace insfuse
