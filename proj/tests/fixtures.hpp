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

#ifndef INSFUSE_TESTS_FIXTURES_HPP_
#define INSFUSE_TESTS_FIXTURES_HPP_

#include <cstdlib>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include "insfuse/types.hpp"

namespace fixtures {

class TempDir {
 public:
  TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "insfuse-XXXXXX").string();
    if (mkdtemp(pattern.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Scores 1, 1 - 1/n, ... in list order.
inline insfuse::Ranking ranking(const std::string& topic, std::initializer_list<std::string> ids) {
  insfuse::Ranking r{topic, {}};
  const double n = static_cast<double>(ids.size());
  double k = 0;
  for (const auto& id : ids) r.entries.push_back({id, 1.0 - k++ / n});
  return r;
}

inline std::vector<std::string> ids(const insfuse::Ranking& r) {
  std::vector<std::string> out;
  for (const auto& e : r.entries) out.push_back(e.shot_id);
  return out;
}

// One video "v" with shots "s0".."s{n-1}", `kf` keyframes each.
inline insfuse::ShotIndexTable line_of_shots(int n, int kf = 10, const std::string& video = "v") {
  std::vector<insfuse::ShotIndex> shots;
  for (int i = 0; i < n; ++i) {
    shots.push_back({video, "s" + std::to_string(i), i, static_cast<insfuse::Keyframe>(i * kf),
                     static_cast<insfuse::Keyframe>(i * kf + kf - 1)});
  }
  return insfuse::ShotIndexTable(shots);
}

inline insfuse::DetectionRecord person(const std::string& shot, insfuse::Keyframe k,
                                       const std::string& id, double conf,
                                       std::optional<insfuse::Box> box = std::nullopt) {
  return {"v", shot, k, insfuse::EntityKind::kPerson, id, conf, box, false};
}

inline insfuse::DetectionRecord action(const std::string& shot, insfuse::Keyframe k,
                                       const std::string& id, double conf,
                                       std::optional<insfuse::Box> box = std::nullopt) {
  return {"v", shot, k, insfuse::EntityKind::kAction, id, conf, box, false};
}

}  // namespace fixtures

#endif  // INSFUSE_TESTS_FIXTURES_HPP_
