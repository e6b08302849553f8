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

#include "insfuse/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "insfuse/io.hpp"

namespace insfuse {
namespace {

constexpr double kFrameWidth = 640.0;
constexpr double kFrameHeight = 360.0;

class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  bool chance(double p) { return uniform(0.0, 1.0) < p; }
  double normal(double stddev) { return std::normal_distribution<double>(0.0, stddev)(engine_); }

 private:
  std::mt19937_64 engine_;
};

struct Track {
  EntityKind kind = EntityKind::kPerson;
  std::string entity_id;
  int first = 0;  // keyframe offsets inside the shot
  int last = 0;
  bool high = false;  // high confidence band
  Box box;
};

double high_band(Random& rng, double noise) {
  return std::clamp(rng.uniform(0.6, 1.0) - noise * rng.uniform(0.0, 0.6), 0.0, 1.0);
}

double low_band(Random& rng, double noise) {
  double value = rng.uniform(0.0, 0.4);
  if (rng.chance(0.3)) value += noise * rng.uniform(0.0, 0.5);
  return std::clamp(value, 0.0, 1.0);
}

Box random_person_box(Random& rng) {
  const double w = rng.uniform(60.0, 120.0);
  const double h = rng.uniform(150.0, 210.0);
  const double x = rng.uniform(0.0, kFrameWidth - w);
  const double y = rng.uniform(0.0, kFrameHeight - h);
  return Box{x, y, x + w, y + h};
}

Box face_of(const Box& person) {
  const double w = person.width();
  return Box{person.x1 + 0.3 * w, person.y1, person.x1 + 0.7 * w,
             person.y1 + 0.25 * person.height()};
}

Box jitter(Random& rng, const Box& box) {
  const double dx = rng.uniform(-2.0, 2.0);
  const double dy = rng.uniform(-2.0, 2.0);
  return Box{box.x1 + dx, box.y1 + dy, box.x2 + dx, box.y2 + dy};
}

// Emits one record per kept keyframe; interior keyframes drop independently.
void emit_track(Random& rng, const Track& track, const ShotIndex& shot, double noise,
                double dropout, DetectionTable& out) {
  const double miss_rate = track.kind == EntityKind::kPerson ? 0.5 * noise : 0.4 * noise;
  const bool high = track.high && !rng.chance(miss_rate);
  const double level = high ? high_band(rng, noise) : low_band(rng, noise);
  for (int offset = track.first; offset <= track.last; ++offset) {
    const bool interior = offset != track.first && offset != track.last;
    if (interior && rng.chance(dropout)) continue;
    DetectionRecord r;
    r.video_id = shot.video_id;
    r.shot_id = shot.shot_id;
    r.keyframe = shot.keyframe_start + offset;
    r.entity_kind = track.kind;
    r.entity_id = track.entity_id;
    r.confidence = std::clamp(level + rng.uniform(-0.05, 0.05), 0.0, 1.0);
    r.box = jitter(rng, track.box);
    out.push_back(std::move(r));
  }
}

std::vector<double> random_unit(Random& rng, int dim) {
  std::vector<double> v(static_cast<std::size_t>(dim));
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : v) {
      x = rng.normal(1.0);
      norm += x * x;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

// Random unit centres, mutually orthogonal while the dimension allows it.
std::vector<std::vector<double>> spread_centres(Random& rng, std::size_t count, int dim) {
  std::vector<std::vector<double>> centres;
  while (centres.size() < count) {
    std::vector<double> v = random_unit(rng, dim);
    if (centres.size() < static_cast<std::size_t>(dim)) {
      for (const auto& c : centres) {
        double dot = 0.0;
        for (std::size_t d = 0; d < v.size(); ++d) dot += v[d] * c[d];
        for (std::size_t d = 0; d < v.size(); ++d) v[d] -= dot * c[d];
      }
      double norm = 0.0;
      for (double x : v) norm += x * x;
      norm = std::sqrt(norm);
      if (norm < 1e-6) continue;
      for (double& x : v) x /= norm;
    }
    centres.push_back(std::move(v));
  }
  return centres;
}

void sort_table(DetectionTable& table) {
  std::sort(table.begin(), table.end(), [](const DetectionRecord& a, const DetectionRecord& b) {
    return std::tie(a.video_id, a.shot_id, a.keyframe, a.entity_kind, a.entity_id) <
           std::tie(b.video_id, b.shot_id, b.keyframe, b.entity_kind, b.entity_id);
  });
}

}  // namespace

void validate(const SyntheticSpec& spec) {
  for (int count : {spec.videos, spec.shots_per_video, spec.keyframes_per_shot, spec.persons,
                    spec.actions, spec.topics, spec.feature_dim, spec.variants}) {
    if (count < 1) throw std::invalid_argument("synthetic spec counts must be >= 1");
  }
  for (double rate : {spec.relevance_rate, spec.detector_noise, spec.dropout_rate}) {
    if (!(rate >= 0.0 && rate <= 1.0)) {
      throw std::invalid_argument("synthetic spec rates must lie in [0,1]");
    }
  }
  if (!(spec.feature_noise >= 0.0)) throw std::invalid_argument("feature_noise must be >= 0");
  if (!(spec.action_run_length >= 1.0)) {
    throw std::invalid_argument("action_run_length must be >= 1");
  }
  if (spec.topics > spec.persons * spec.actions) {
    throw std::invalid_argument("more topics than distinct person/action pairs");
  }
}

SyntheticDataset generate_synthetic(const SyntheticSpec& spec) {
  validate(spec);
  Random rng(spec.seed);
  SyntheticDataset data;
  const int kf = spec.keyframes_per_shot;

  std::vector<ShotIndex> shots;
  for (int v = 0; v < spec.videos; ++v) {
    for (int o = 0; o < spec.shots_per_video; ++o) {
      shots.push_back(ShotIndex{"v" + std::to_string(v + 1),
                                "shot" + std::to_string(v + 1) + "_" + std::to_string(o + 1), o,
                                static_cast<Keyframe>(o) * kf,
                                static_cast<Keyframe>(o) * kf + kf - 1});
    }
  }
  data.shots = ShotIndexTable(shots);

  std::vector<std::pair<int, int>> pairs;
  for (int p = 0; p < spec.persons; ++p) {
    for (int a = 0; a < spec.actions; ++a) pairs.emplace_back(p, a);
  }
  std::shuffle(pairs.begin(), pairs.end(), std::mt19937_64(spec.seed ^ 0x9e3779b97f4a7c15ULL));
  for (int t = 0; t < spec.topics; ++t) {
    data.topics.push_back(Topic{std::to_string(9301 + t),
                                "person" + std::to_string(pairs[t].first + 1),
                                "action" + std::to_string(pairs[t].second + 1)});
  }

  // Relevance: one chain per video over {background, topic 1..T}. Topic runs
  // have mean length action_run_length and each topic's stationary share is
  // relevance_rate, so a shot is relevant to at most one topic.
  const std::size_t topic_count = data.topics.size();
  const double rate = spec.relevance_rate;
  const double leave = 1.0 / spec.action_run_length;
  const double background_share = 1.0 - static_cast<double>(topic_count) * rate;
  const bool has_background = background_share > 0.0;
  const double enter =
      has_background
          ? std::min(1.0 / static_cast<double>(topic_count),
                     rate / (spec.action_run_length * background_share))
          : 0.0;
  std::vector<std::vector<bool>> relevant(topic_count, std::vector<bool>(shots.size(), false));
  auto draw_topic = [&] { return rng.integer(0, static_cast<int>(topic_count) - 1); };
  for (int v = 0; v < spec.videos; ++v) {
    int state = -1;
    for (int o = 0; o < spec.shots_per_video; ++o) {
      if (o == 0) {
        const double u = rng.uniform(0.0, 1.0);
        if (!has_background) {
          state = draw_topic();
        } else if (u < static_cast<double>(topic_count) * rate) {
          state = std::min(static_cast<int>(u / rate), static_cast<int>(topic_count) - 1);
        }
      } else if (state < 0) {
        const double u = rng.uniform(0.0, 1.0);
        if (u < static_cast<double>(topic_count) * enter) {
          state = std::min(static_cast<int>(u / enter), static_cast<int>(topic_count) - 1);
        }
      } else if (rng.chance(leave)) {
        state = has_background ? -1 : draw_topic();
      }
      if (state >= 0) {
        relevant[static_cast<std::size_t>(state)]
                [static_cast<std::size_t>(v * spec.shots_per_video + o)] = true;
      }
    }
  }
  for (std::size_t t = 0; t < data.topics.size(); ++t) {
    for (std::size_t s = 0; s < shots.size(); ++s) {
      data.qrels.set(data.topics[t].topic_id, shots[s].shot_id, relevant[t][s] ? 1 : 0);
    }
  }

  // Track layout per shot, shared by all variants.
  std::vector<std::vector<Track>> layout(shots.size());
  for (std::size_t s = 0; s < shots.size(); ++s) {
    std::map<std::pair<EntityKind, std::string>, Track> tracks;
    for (std::size_t t = 0; t < data.topics.size(); ++t) {
      if (!relevant[t][s]) continue;
      const Topic& topic = data.topics[t];
      const Box person = random_person_box(rng);
      const int face_len = rng.integer((kf + 1) / 2, kf);
      const int face_first = rng.integer(0, kf - face_len);
      const int action_len = rng.integer(std::min(2, face_len), face_len);
      const int action_first = face_first + rng.integer(0, face_len - action_len);
      tracks.try_emplace({EntityKind::kPerson, topic.person_id},
                         Track{EntityKind::kPerson, topic.person_id, face_first,
                               face_first + face_len - 1, true, face_of(person)});
      tracks.try_emplace({EntityKind::kAction, topic.action_id},
                         Track{EntityKind::kAction, topic.action_id, action_first,
                               action_first + action_len - 1, true, person});
    }
    // Background: at most one extra person and one extra action, low band.
    for (EntityKind kind : {EntityKind::kPerson, EntityKind::kAction}) {
      if (!rng.chance(0.6)) continue;
      const int count = kind == EntityKind::kPerson ? spec.persons : spec.actions;
      const std::string id = (kind == EntityKind::kPerson ? "person" : "action") +
                             std::to_string(rng.integer(1, count));
      const int len = rng.integer(1, kf);
      const int first = rng.integer(0, kf - len);
      const Box owner = random_person_box(rng);
      tracks.try_emplace({kind, id}, Track{kind, id, first, first + len - 1, false,
                                           kind == EntityKind::kPerson ? face_of(owner) : owner});
    }
    for (auto& [key, track] : tracks) layout[s].push_back(std::move(track));
  }

  DetectionTable faces;
  for (std::size_t s = 0; s < shots.size(); ++s) {
    for (const Track& track : layout[s]) {
      if (track.kind == EntityKind::kPerson) {
        emit_track(rng, track, shots[s], spec.detector_noise, spec.dropout_rate, faces);
      }
    }
  }
  for (int variant = 0; variant < spec.variants; ++variant) {
    Random variant_rng(spec.seed * 1000003ULL + static_cast<std::uint64_t>(variant) + 1);
    DetectionTable table = faces;
    for (std::size_t s = 0; s < shots.size(); ++s) {
      for (const Track& track : layout[s]) {
        if (track.kind == EntityKind::kAction) {
          emit_track(variant_rng, track, shots[s], spec.detector_noise, spec.dropout_rate, table);
        }
      }
    }
    sort_table(table);
    data.detections.push_back(std::move(table));
  }

  // The last centre is the background cluster.
  std::vector<std::vector<double>> topic_centres =
      spread_centres(rng, data.topics.size() + 1, spec.feature_dim);
  const std::vector<double> background_centre = std::move(topic_centres.back());
  topic_centres.pop_back();
  const double per_dim = spec.feature_noise / std::sqrt(static_cast<double>(spec.feature_dim));
  for (std::size_t s = 0; s < shots.size(); ++s) {
    std::vector<double> x(static_cast<std::size_t>(spec.feature_dim), 0.0);
    bool any = false;
    for (std::size_t t = 0; t < data.topics.size(); ++t) {
      if (!relevant[t][s]) continue;
      any = true;
      for (std::size_t d = 0; d < x.size(); ++d) x[d] += topic_centres[t][d];
    }
    if (!any) {
      for (std::size_t d = 0; d < x.size(); ++d) x[d] += background_centre[d];
    }
    for (double& value : x) value += rng.normal(per_dim);
    data.features.insert(shots[s].shot_id, std::move(x));
  }
  return data;
}

std::filesystem::path variant_detections_path(const std::filesystem::path& dir, int variant) {
  return variant == 0 ? dir / "detections.tsv"
                      : dir / ("detections." + std::to_string(variant) + ".tsv");
}

void write_dataset(const SyntheticDataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::filesystem::path& path, auto&& body) {
    std::ostringstream out;
    body(out);
    write_file_atomic(path, out.str());
  };
  for (std::size_t v = 0; v < dataset.detections.size(); ++v) {
    write(variant_detections_path(dir, static_cast<int>(v)),
          [&](std::ostream& out) { write_detections(dataset.detections[v], out); });
  }
  write(dir / "shots.tsv", [&](std::ostream& out) { write_shots(dataset.shots, out); });
  write(dir / "topics.tsv", [&](std::ostream& out) { write_topics(dataset.topics, out); });
  write(dir / "features.tsv", [&](std::ostream& out) { write_features(dataset.features, out); });
  write(dir / "qrels.txt", [&](std::ostream& out) { write_qrels(dataset.qrels, out); });
}

SyntheticDataset synth_generate(const SyntheticSpec& spec, const std::filesystem::path& dir) {
  SyntheticDataset data = generate_synthetic(spec);
  write_dataset(data, dir);
  return data;
}

}  // namespace insfuse
