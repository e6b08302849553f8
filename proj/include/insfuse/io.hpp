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

#ifndef INSFUSE_IO_HPP_
#define INSFUSE_IO_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "insfuse/types.hpp"

namespace insfuse {

inline constexpr std::size_t kDefaultRunDepth = 1000;

// Tab-separated tables. Loaders throw ParseError/RangeError with the 1-based
// line number and the offending field, and ValidationError for cross-record
// invariants (duplicate keys, ordinal gaps, dimension mismatch). Blank lines
// are skipped.
//
// detections.tsv  video shot keyframe kind entity conf x1 y1 x2 y2  ("-" = no box)
// shots.tsv       video shot ordinal kf_start kf_end
// topics.tsv      topic person action
// features.tsv    shot f1 ... fd
// qrels.txt       topic 0 shot rel
DetectionTable load_detections(std::istream& in);
ShotIndexTable load_shots(std::istream& in);
std::vector<Topic> load_topics(std::istream& in);
FeatureTable load_features(std::istream& in);
Qrels load_qrels(std::istream& in);

void write_detections(const DetectionTable& table, std::ostream& out);
void write_shots(const ShotIndexTable& shots, std::ostream& out);
void write_topics(std::span<const Topic> topics, std::ostream& out);
void write_features(const FeatureTable& features, std::ostream& out);
void write_qrels(const Qrels& qrels, std::ostream& out);

// trec run format: "topic Q0 shot rank score tag", ranks from 1, six decimals.
std::string write_run(const Ranking& ranking, std::size_t depth = kDefaultRunDepth);
std::string write_runs(std::span<const Ranking> rankings,
                       std::size_t depth = kDefaultRunDepth);
// Groups lines by topic in order of first appearance. Throws ParseError on
// malformed lines or when scores increase / ranks repeat within a topic.
std::vector<Ranking> read_run(std::istream& in);

// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

// File conveniences. Readers throw std::runtime_error naming the path when
// it cannot be opened; parser errors propagate unchanged.
std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temporary and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

DetectionTable load_detections_file(const std::filesystem::path& path);
ShotIndexTable load_shots_file(const std::filesystem::path& path);
std::vector<Topic> load_topics_file(const std::filesystem::path& path);
FeatureTable load_features_file(const std::filesystem::path& path);
Qrels load_qrels_file(const std::filesystem::path& path);
std::vector<Ranking> read_run_file(const std::filesystem::path& path);

}  // namespace insfuse

#endif  // INSFUSE_IO_HPP_
