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

#include "insfuse/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "insfuse/errors.hpp"

namespace insfuse {
namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

// Calls `handle(line_number, line)` for every non-blank line, CR stripped.
template <typename Handler>
void for_each_line(std::istream& in, Handler&& handle) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    handle(number, std::string_view(line));
  }
}

void expect_columns(std::size_t line, const std::vector<std::string_view>& fields,
                    std::size_t expected) {
  if (fields.size() != expected) {
    throw ParseError(line, "columns",
                     "expected " + std::to_string(expected) + " columns, got " +
                         std::to_string(fields.size()));
  }
}

std::string non_empty(std::size_t line, std::string_view field, std::string_view text) {
  if (text.empty()) throw ParseError(line, std::string(field), "empty value");
  return std::string(text);
}

std::int64_t parse_int(std::size_t line, std::string_view field, std::string_view text) {
  std::int64_t value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    throw ParseError(line, std::string(field), "not an integer: \"" + std::string(text) + "\"");
  }
  return value;
}

double parse_real(std::size_t line, std::string_view field, std::string_view text) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    throw ParseError(line, std::string(field), "not a number: \"" + std::string(text) + "\"");
  }
  if (!std::isfinite(value)) {
    throw RangeError(line, std::string(field), "non-finite value");
  }
  return value;
}

template <typename Loader>
auto load_path(const std::filesystem::path& path, Loader&& loader) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return loader(in);
}

}  // namespace

std::string format_number(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, end);
}

DetectionTable load_detections(std::istream& in) {
  DetectionTable table;
  std::set<std::tuple<std::string, std::string, Keyframe, EntityKind, std::string>> keys;
  for_each_line(in, [&](std::size_t line, std::string_view text) {
    const auto fields = split(text, '\t');
    expect_columns(line, fields, 10);
    DetectionRecord record;
    record.video_id = non_empty(line, "video_id", fields[0]);
    record.shot_id = non_empty(line, "shot_id", fields[1]);
    record.keyframe = parse_int(line, "keyframe", fields[2]);
    if (record.keyframe < 0) throw RangeError(line, "keyframe", "negative keyframe");
    const auto kind = parse_entity_kind(fields[3]);
    if (!kind) {
      throw ParseError(line, "entity_kind",
                       "expected person or action, got \"" + std::string(fields[3]) + "\"");
    }
    record.entity_kind = *kind;
    record.entity_id = non_empty(line, "entity_id", fields[4]);
    record.confidence = parse_real(line, "confidence", fields[5]);
    if (record.confidence < 0.0 || record.confidence > 1.0) {
      throw RangeError(line, "confidence", "confidence outside [0,1]");
    }
    static constexpr std::string_view kBoxFields[] = {"x1", "y1", "x2", "y2"};
    int absent = 0;
    for (int i = 0; i < 4; ++i) absent += fields[6 + i] == "-" ? 1 : 0;
    if (absent != 0 && absent != 4) {
      throw ParseError(line, "box", "box fields must be all numeric or all \"-\"");
    }
    if (absent == 0) {
      double coords[4];
      for (int i = 0; i < 4; ++i) coords[i] = parse_real(line, kBoxFields[i], fields[6 + i]);
      Box box{coords[0], coords[1], coords[2], coords[3]};
      if (!box.valid()) throw RangeError(line, "box", "box must have x1<x2 and y1<y2");
      record.box = box;
    }
    if (!keys.emplace(record.video_id, record.shot_id, record.keyframe, record.entity_kind,
                      record.entity_id)
             .second) {
      throw ValidationError("line " + std::to_string(line) + ": duplicate detection key");
    }
    table.push_back(std::move(record));
  });
  return table;
}

ShotIndexTable load_shots(std::istream& in) {
  std::vector<ShotIndex> shots;
  for_each_line(in, [&](std::size_t line, std::string_view text) {
    const auto fields = split(text, '\t');
    expect_columns(line, fields, 5);
    ShotIndex shot;
    shot.video_id = non_empty(line, "video_id", fields[0]);
    shot.shot_id = non_empty(line, "shot_id", fields[1]);
    shot.ordinal = parse_int(line, "ordinal", fields[2]);
    if (shot.ordinal < 0) throw RangeError(line, "ordinal", "negative ordinal");
    shot.keyframe_start = parse_int(line, "kf_start", fields[3]);
    shot.keyframe_end = parse_int(line, "kf_end", fields[4]);
    if (shot.keyframe_start > shot.keyframe_end) {
      throw RangeError(line, "kf_end", "kf_start > kf_end");
    }
    shots.push_back(std::move(shot));
  });
  return ShotIndexTable(std::move(shots));
}

std::vector<Topic> load_topics(std::istream& in) {
  std::vector<Topic> topics;
  std::unordered_set<std::string> ids;
  for_each_line(in, [&](std::size_t line, std::string_view text) {
    const auto fields = split(text, '\t');
    expect_columns(line, fields, 3);
    Topic topic{non_empty(line, "topic_id", fields[0]), non_empty(line, "person_id", fields[1]),
                non_empty(line, "action_id", fields[2])};
    if (!ids.insert(topic.topic_id).second) {
      throw ValidationError("line " + std::to_string(line) + ": duplicate topic " +
                            topic.topic_id);
    }
    topics.push_back(std::move(topic));
  });
  return topics;
}

FeatureTable load_features(std::istream& in) {
  FeatureTable features;
  for_each_line(in, [&](std::size_t line, std::string_view text) {
    const auto fields = split(text, '\t');
    if (fields.size() < 2) throw ParseError(line, "columns", "expected shot id and values");
    std::vector<double> values;
    values.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      values.push_back(parse_real(line, "f" + std::to_string(i), fields[i]));
    }
    try {
      features.insert(non_empty(line, "shot_id", fields[0]), std::move(values));
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line) + ": " + e.what());
    }
  });
  return features;
}

Qrels load_qrels(std::istream& in) {
  Qrels qrels;
  for_each_line(in, [&](std::size_t line, std::string_view text) {
    const auto fields = split_whitespace(text);
    expect_columns(line, fields, 4);
    const std::int64_t relevance = parse_int(line, "rel", fields[3]);
    if (relevance != 0 && relevance != 1) throw RangeError(line, "rel", "relevance must be 0 or 1");
    try {
      qrels.set(std::string(fields[0]), std::string(fields[2]), static_cast<int>(relevance));
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line) + ": " + e.what());
    }
  });
  return qrels;
}

void write_detections(const DetectionTable& table, std::ostream& out) {
  for (const DetectionRecord& r : table) {
    out << r.video_id << '\t' << r.shot_id << '\t' << r.keyframe << '\t'
        << to_string(r.entity_kind) << '\t' << r.entity_id << '\t'
        << format_number(r.confidence);
    if (r.box) {
      out << '\t' << format_number(r.box->x1) << '\t' << format_number(r.box->y1) << '\t'
          << format_number(r.box->x2) << '\t' << format_number(r.box->y2);
    } else {
      out << "\t-\t-\t-\t-";
    }
    out << '\n';
  }
}

void write_shots(const ShotIndexTable& shots, std::ostream& out) {
  for (const ShotIndex& s : shots.shots()) {
    out << s.video_id << '\t' << s.shot_id << '\t' << s.ordinal << '\t' << s.keyframe_start
        << '\t' << s.keyframe_end << '\n';
  }
}

void write_topics(std::span<const Topic> topics, std::ostream& out) {
  for (const Topic& t : topics) {
    out << t.topic_id << '\t' << t.person_id << '\t' << t.action_id << '\n';
  }
}

void write_features(const FeatureTable& features, std::ostream& out) {
  for (const auto& [shot, values] : features.vectors()) {
    out << shot;
    for (double x : values) out << '\t' << format_number(x);
    out << '\n';
  }
}

void write_qrels(const Qrels& qrels, std::ostream& out) {
  for (const std::string& topic : qrels.topics()) {
    for (const auto& [shot, rel] : *qrels.judgments(topic)) {
      out << topic << " 0 " << shot << ' ' << rel << '\n';
    }
  }
}

std::string write_run(const Ranking& ranking, std::size_t depth) {
  std::string out;
  const std::size_t n = std::min(depth, ranking.entries.size());
  char score[64];
  for (std::size_t i = 0; i < n; ++i) {
    const RankedShot& entry = ranking.entries[i];
    std::snprintf(score, sizeof score, "%.6f", entry.score);
    out += ranking.topic_id;
    out += " Q0 ";
    out += entry.shot_id;
    out += ' ';
    out += std::to_string(i + 1);
    out += ' ';
    out += score;
    out += ' ';
    out += ranking.run_tag;
    out += '\n';
  }
  return out;
}

std::string write_runs(std::span<const Ranking> rankings, std::size_t depth) {
  std::string out;
  for (const Ranking& ranking : rankings) out += write_run(ranking, depth);
  return out;
}

std::vector<Ranking> read_run(std::istream& in) {
  std::vector<Ranking> rankings;
  std::unordered_map<std::string, std::size_t> position;
  std::vector<std::int64_t> last_rank;
  std::vector<std::unordered_set<std::string>> seen;
  for_each_line(in, [&](std::size_t line, std::string_view text) {
    const auto fields = split_whitespace(text);
    expect_columns(line, fields, 6);
    const std::string topic(fields[0]);
    const std::int64_t rank = parse_int(line, "rank", fields[3]);
    const double score = parse_real(line, "score", fields[4]);
    auto [it, inserted] = position.emplace(topic, rankings.size());
    if (inserted) {
      rankings.push_back(Ranking{topic, {}, std::string(fields[5])});
      last_rank.push_back(0);
      seen.emplace_back();
    }
    const std::size_t t = it->second;
    Ranking& ranking = rankings[t];
    if (rank <= last_rank[t]) throw ParseError(line, "rank", "non-monotone ranks");
    if (!ranking.entries.empty() && score > ranking.entries.back().score) {
      throw ParseError(line, "score", "non-monotone scores");
    }
    std::string shot(fields[2]);
    if (!seen[t].insert(shot).second) {
      throw ParseError(line, "shot_id", "duplicate shot " + shot);
    }
    last_rank[t] = rank;
    ranking.entries.push_back(RankedShot{std::move(shot), score});
  });
  return rankings;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  std::filesystem::path temp = path;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + temp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for " + temp.string());
  }
  std::filesystem::rename(temp, path);
}

DetectionTable load_detections_file(const std::filesystem::path& path) {
  return load_path(path, [](std::istream& in) { return load_detections(in); });
}

ShotIndexTable load_shots_file(const std::filesystem::path& path) {
  return load_path(path, [](std::istream& in) { return load_shots(in); });
}

std::vector<Topic> load_topics_file(const std::filesystem::path& path) {
  return load_path(path, [](std::istream& in) { return load_topics(in); });
}

FeatureTable load_features_file(const std::filesystem::path& path) {
  return load_path(path, [](std::istream& in) { return load_features(in); });
}

Qrels load_qrels_file(const std::filesystem::path& path) {
  return load_path(path, [](std::istream& in) { return load_qrels(in); });
}

std::vector<Ranking> read_run_file(const std::filesystem::path& path) {
  return load_path(path, [](std::istream& in) { return read_run(in); });
}

}  // namespace insfuse
