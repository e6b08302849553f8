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

#ifndef INSFUSE_SESSION_HPP_
#define INSFUSE_SESSION_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "insfuse/feedback.hpp"
#include "insfuse/simulation.hpp"
#include "insfuse/types.hpp"

namespace insfuse {

// Error surfaced to service clients. status follows HTTP semantics.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, std::string code, const std::string& message)
      : std::runtime_error(message), status_(status), code_(std::move(code)) {}

  int status() const { return status_; }
  const std::string& code() const { return code_; }

 private:
  int status_;
  std::string code_;
};

struct StrategySpec {
  FeedbackKind kind = FeedbackKind::kTopK;
  TopKStrategy topk;
  CaafParams caaf;
  // Feature file (relative to the data directory) used by CAAF.
  std::string features = "features.tsv";
};

struct LabelRejection {
  std::string shot_id;
  std::string reason;
};

// One accepted label post. `labels` holds only the labels that changed state.
struct LabelBatch {
  int version = 0;
  std::int64_t timestamp_ms = 0;
  double round_seconds = 0.0;  // wall clock since the previous post
  std::vector<Label> labels;
};

// Feedback state machine behind one session: Top-K rearrangement of the
// input ranking, or CAAF. Not thread-safe; SessionStore serializes writers.
class FeedbackSession {
 public:
  // `features` must be non-null for CAAF; CAAF init errors propagate.
  FeedbackSession(Ranking original, StrategySpec strategy, const FeatureTable* features);

  struct Outcome {
    std::vector<Label> applied;
    std::vector<LabelRejection> rejected;
  };

  // Applies the labels that change state; repeated (shot, polarity) pairs
  // and shots outside the session are skipped. Increments the version.
  Outcome post(std::span<const Label> labels);

  const Ranking& ranking() const { return ranking_; }
  const Ranking& original() const { return original_; }
  std::vector<std::string> recommendations() const;
  int version() const { return version_; }
  const LabelSet& labels() const { return labels_; }
  const std::optional<CaafState>& caaf_state() const { return caaf_; }

 private:
  bool knows(const std::string& shot_id) const;

  Ranking original_;
  StrategySpec strategy_;
  Ranking ranking_;
  LabelSet labels_;
  std::optional<CaafState> caaf_;
  int version_ = 0;
};

struct SessionInfo {
  std::string session_id;
  std::string topic_id;
  std::string run;
  StrategySpec strategy;
};

struct CreateResult {
  std::string session_id;
  std::vector<std::string> recommendations;
};

struct PostResult {
  int version = 0;
  std::vector<std::string> recommendations;
  std::vector<LabelRejection> rejected;
};

struct RankingSnapshot {
  std::string session_id;
  int version = 0;
  Ranking ranking;
};

// All live sessions. Run files and feature tables are read from data_dir;
// keyframe thumbnails from assets_dir as <shot_id>.jpg. Throws ServiceError.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path data_dir,
                        std::optional<std::filesystem::path> assets_dir = std::nullopt);

  CreateResult create(const std::string& run, const std::string& topic_id,
                      const StrategySpec& strategy);
  PostResult post_labels(const std::string& session_id, std::span<const Label> labels);
  RankingSnapshot ranking(const std::string& session_id,
                          std::optional<std::size_t> limit = std::nullopt) const;
  std::string export_run(const std::string& session_id) const;
  std::vector<LabelBatch> log(const std::string& session_id) const;
  SessionInfo info(const std::string& session_id) const;
  // Thumbnail bytes, or nullopt when absent.
  std::optional<std::string> keyframe_asset(const std::string& shot_id) const;

 private:
  struct Entry {
    SessionInfo info;
    mutable std::mutex mutex;
    FeedbackSession session;
    std::shared_ptr<const Ranking> snapshot;
    std::vector<LabelBatch> log;
    std::int64_t last_post_ms = 0;

    Entry(SessionInfo i, FeedbackSession s);
  };

  std::shared_ptr<Entry> find(const std::string& session_id) const;
  std::filesystem::path data_file(const std::string& name) const;
  std::shared_ptr<const FeatureTable> features(const std::string& name);

  std::filesystem::path data_dir_;
  std::optional<std::filesystem::path> assets_dir_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::map<std::string, std::shared_ptr<const FeatureTable>> feature_cache_;
  std::uint64_t counter_ = 0;
};

}  // namespace insfuse

#endif  // INSFUSE_SESSION_HPP_
