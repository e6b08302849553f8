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

#include "insfuse/pipeline.hpp"

#include <set>
#include <sstream>
#include <utility>

#include "insfuse/evaluation.hpp"
#include "insfuse/io.hpp"
#include "json.hpp"

namespace insfuse {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

template <typename Fn>
auto in_stage(const std::string& stage, const std::string& topic, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, topic, e.what());
  }
}

void reject_unknown(const json& object, std::initializer_list<std::string_view> keys,
                    const std::string& where) {
  if (!object.is_object()) throw std::invalid_argument(where + " must be an object");
  for (const auto& [key, unused] : object.items()) {
    bool known = false;
    for (std::string_view k : keys) known = known || key == k;
    if (!known) throw std::invalid_argument("unknown config key " + where + "." + key);
  }
}

template <typename T>
void read(const json& object, const char* key, T& target) {
  if (object.contains(key)) target = object.at(key).get<T>();
}

fs::path resolve(const fs::path& base, const std::string& path) {
  fs::path p(path);
  return p.is_absolute() ? p : base / p;
}

}  // namespace

void validate(const PipelineSettings& settings, std::size_t variants) {
  if (variants == 0) throw std::invalid_argument("pipeline needs at least one detection table");
  if (settings.stages.aggregate && variants < 2) {
    throw std::invalid_argument("aggregation needs at least two detection variants");
  }
  if (settings.fusion.delta < 0.0 || settings.fusion.delta > 1.0) {
    throw std::invalid_argument("delta must lie in [0,1]");
  }
  if (settings.depth == 0) throw std::invalid_argument("depth must be >= 1");
  if (settings.stages.feedback && settings.feedback.kind == FeedbackKind::kCaaf) {
    validate(settings.feedback.caaf);
  }
}

PipelineRuns run_stages(const PipelineInputs& inputs, const PipelineSettings& settings,
                        const Qrels* qrels, const FeatureTable* features) {
  in_stage("config", "", [&] {
    validate(settings, inputs.variants.size());
    if (settings.stages.feedback && qrels == nullptr) {
      throw std::invalid_argument("feedback stage needs qrels");
    }
    return 0;
  });
  FusionParams fusion = settings.fusion;
  fusion.icv_enabled = settings.stages.icv;

  PipelineRuns runs;
  for (const DetectionTable& variant : inputs.variants) {
    const DetectionTable extended = in_stage("ide", "", [&] {
      return settings.stages.ide ? apply_ide(variant, inputs.shots, settings.ide) : variant;
    });
    std::vector<Ranking> fused;
    for (const Topic& topic : inputs.topics) {
      fused.push_back(in_stage("fuse", topic.topic_id, [&] {
        return fuse_topic(topic, extended, inputs.shots, fusion, &runs.warnings,
                          settings.run_tag);
      }));
    }
    if (settings.stages.ste) {
      std::vector<Ranking> diffused;
      for (const Ranking& ranking : fused) {
        diffused.push_back(in_stage("ste", ranking.topic_id, [&] {
          return apply_ste(ranking, inputs.shots, settings.ste);
        }));
      }
      runs.ste.push_back(std::move(diffused));
    }
    runs.fused.push_back(std::move(fused));
  }

  const auto& last = settings.stages.ste ? runs.ste : runs.fused;
  if (settings.stages.aggregate) {
    for (std::size_t t = 0; t < inputs.topics.size(); ++t) {
      const std::string& topic = inputs.topics[t].topic_id;
      std::vector<Ranking> lists;
      bool any = false;
      for (const auto& variant : last) {
        lists.push_back(variant[t]);
        any = any || !variant[t].empty();
      }
      if (!any) {
        runs.automatic.push_back(Ranking{topic, {}, settings.run_tag});
        runs.aggregation.push_back(TopicAggregation{topic, {}, 0, true});
        continue;
      }
      HqResult result = in_stage("aggregate", topic, [&] {
        return hq_aggregate(normalize_ranks(lists), settings.hq, settings.run_tag);
      });
      runs.aggregation.push_back(
          TopicAggregation{topic, result.alphas, result.iterations, result.converged});
      runs.automatic.push_back(std::move(result.consensus));
    }
  } else {
    runs.automatic = last.front();
  }

  if (settings.stages.feedback) {
    for (const Ranking& ranking : runs.automatic) {
      runs.final.push_back(in_stage("feedback", ranking.topic_id, [&] {
        return simulate_feedback(ranking, *qrels, features, settings.feedback, settings.depth)
            .ranking;
      }));
    }
  } else {
    runs.final = runs.automatic;
  }
  return runs;
}

PipelineConfig parse_config(const std::string& text, const fs::path& base_dir) {
  const json root = json::parse(text);
  reject_unknown(root,
                 {"inputs", "output_dir", "run_tag", "depth", "stages", "fusion", "ide", "ste",
                  "aggregation", "feedback"},
                 "config");
  PipelineConfig config;
  PipelineSettings& s = config.settings;

  const json& inputs = root.at("inputs");
  reject_unknown(inputs, {"detections", "shots", "topics", "qrels", "features"}, "inputs");
  const json& detections = inputs.at("detections");
  if (detections.is_string()) {
    config.detections.push_back(resolve(base_dir, detections.get<std::string>()));
  } else {
    for (const auto& path : detections) {
      config.detections.push_back(resolve(base_dir, path.get<std::string>()));
    }
  }
  config.shots = resolve(base_dir, inputs.at("shots").get<std::string>());
  config.topics = resolve(base_dir, inputs.at("topics").get<std::string>());
  if (inputs.contains("qrels")) config.qrels = resolve(base_dir, inputs["qrels"].get<std::string>());
  if (inputs.contains("features")) {
    config.features = resolve(base_dir, inputs["features"].get<std::string>());
  }
  if (root.contains("output_dir")) {
    config.output_dir = resolve(base_dir, root["output_dir"].get<std::string>());
  } else {
    config.output_dir = base_dir / "out";
  }
  read(root, "run_tag", s.run_tag);
  read(root, "depth", s.depth);

  if (root.contains("stages")) {
    const json& stages = root["stages"];
    reject_unknown(stages, {"ide", "icv", "ste", "aggregate", "feedback"}, "stages");
    read(stages, "ide", s.stages.ide);
    read(stages, "icv", s.stages.icv);
    read(stages, "ste", s.stages.ste);
    read(stages, "aggregate", s.stages.aggregate);
    read(stages, "feedback", s.stages.feedback);
  }
  if (root.contains("fusion")) {
    reject_unknown(root["fusion"], {"delta"}, "fusion");
    read(root["fusion"], "delta", s.fusion.delta);
  }
  if (root.contains("ide")) {
    reject_unknown(root["ide"], {"max_gap"}, "ide");
    read(root["ide"], "max_gap", s.ide.max_gap);
  }
  if (root.contains("ste")) {
    const json& ste = root["ste"];
    reject_unknown(ste, {"theta", "sigma", "p", "topics"}, "ste");
    read(ste, "theta", s.ste.theta);
    read(ste, "sigma", s.ste.sigma);
    read(ste, "p", s.ste.p);
    if (ste.contains("topics") && !ste["topics"].is_null()) {
      s.ste.enabled_topics = ste["topics"].get<std::set<std::string>>();
    }
  }
  if (root.contains("aggregation")) {
    const json& hq = root["aggregation"];
    reject_unknown(hq, {"sigma_hq", "epsilon", "max_iters"}, "aggregation");
    if (hq.contains("sigma_hq")) {
      if (hq["sigma_hq"].is_string()) {
        if (hq["sigma_hq"].get<std::string>() != "auto") {
          throw std::invalid_argument("aggregation.sigma_hq must be \"auto\" or a number");
        }
        s.hq.sigma_hq.reset();
      } else {
        s.hq.sigma_hq = hq["sigma_hq"].get<double>();
      }
    }
    read(hq, "epsilon", s.hq.epsilon);
    read(hq, "max_iters", s.hq.max_iters);
  }
  if (root.contains("feedback")) {
    const json& fb = root["feedback"];
    reject_unknown(fb,
                   {"strategy", "mode", "k", "rounds", "a_probe", "n_gallery", "beta", "lambda",
                    "batch", "max_sweeps", "tol"},
                   "feedback");
    if (fb.contains("strategy")) {
      const auto kind = parse_feedback_kind(fb["strategy"].get<std::string>());
      if (!kind) throw std::invalid_argument("feedback.strategy must be topk or caaf");
      s.feedback.kind = *kind;
    }
    if (fb.contains("mode")) {
      const auto mode = parse_topk_mode(fb["mode"].get<std::string>());
      if (!mode) throw std::invalid_argument("feedback.mode must be positive_only, negative_only or both");
      s.feedback.topk.mode = *mode;
    }
    read(fb, "k", s.feedback.topk.k);
    read(fb, "rounds", s.feedback.rounds);
    read(fb, "a_probe", s.feedback.caaf.a_probe);
    read(fb, "n_gallery", s.feedback.caaf.n_gallery);
    if (fb.contains("beta")) {
      if (fb["beta"].is_string()) {
        if (fb["beta"].get<std::string>() != "auto") {
          throw std::invalid_argument("feedback.beta must be \"auto\" or a number");
        }
        s.feedback.caaf.beta.reset();
      } else {
        s.feedback.caaf.beta = fb["beta"].get<double>();
      }
    }
    read(fb, "lambda", s.feedback.caaf.lambda);
    read(fb, "batch", s.feedback.caaf.batch);
    read(fb, "max_sweeps", s.feedback.caaf.max_sweeps);
    read(fb, "tol", s.feedback.caaf.tol);
  }
  if (s.stages.feedback && !config.qrels) {
    throw std::invalid_argument("feedback stage needs inputs.qrels");
  }
  if (s.stages.feedback && s.feedback.kind == FeedbackKind::kCaaf && !config.features) {
    throw std::invalid_argument("CAAF feedback needs inputs.features");
  }
  validate(s, config.detections.size());
  return config;
}

PipelineConfig load_config(const fs::path& path) {
  return parse_config(read_file(path), path.parent_path());
}

std::string config_to_json(const PipelineConfig& config) {
  const PipelineSettings& s = config.settings;
  json root;
  json detections = json::array();
  for (const auto& path : config.detections) detections.push_back(path.string());
  root["inputs"] = {{"detections", detections},
                    {"shots", config.shots.string()},
                    {"topics", config.topics.string()}};
  if (config.qrels) root["inputs"]["qrels"] = config.qrels->string();
  if (config.features) root["inputs"]["features"] = config.features->string();
  root["output_dir"] = config.output_dir.string();
  root["run_tag"] = s.run_tag;
  root["depth"] = s.depth;
  root["stages"] = {{"ide", s.stages.ide},
                    {"icv", s.stages.icv},
                    {"ste", s.stages.ste},
                    {"aggregate", s.stages.aggregate},
                    {"feedback", s.stages.feedback}};
  root["fusion"] = {{"delta", s.fusion.delta}};
  root["ide"] = {{"max_gap", s.ide.max_gap}};
  root["ste"] = {{"theta", s.ste.theta}, {"sigma", s.ste.sigma}, {"p", s.ste.p}};
  root["ste"]["topics"] =
      s.ste.enabled_topics ? json(*s.ste.enabled_topics) : json(nullptr);
  root["aggregation"] = {{"epsilon", s.hq.epsilon}, {"max_iters", s.hq.max_iters}};
  root["aggregation"]["sigma_hq"] = s.hq.sigma_hq ? json(*s.hq.sigma_hq) : json("auto");
  const FeedbackSettings& fb = s.feedback;
  root["feedback"] = {{"strategy", std::string(to_string(fb.kind))},
                      {"mode", std::string(to_string(fb.topk.mode))},
                      {"k", fb.topk.k},
                      {"rounds", fb.rounds},
                      {"a_probe", fb.caaf.a_probe},
                      {"n_gallery", fb.caaf.n_gallery},
                      {"lambda", fb.caaf.lambda},
                      {"batch", fb.caaf.batch},
                      {"max_sweeps", fb.caaf.max_sweeps},
                      {"tol", fb.caaf.tol}};
  root["feedback"]["beta"] = fb.caaf.beta ? json(*fb.caaf.beta) : json("auto");
  return root.dump(2) + "\n";
}

PipelineReport run_pipeline(const PipelineConfig& config) {
  const PipelineSettings& settings = config.settings;
  PipelineInputs inputs;
  std::optional<Qrels> qrels;
  std::optional<FeatureTable> features;
  in_stage("load", "", [&] {
    for (const auto& path : config.detections) inputs.variants.push_back(load_detections_file(path));
    inputs.shots = load_shots_file(config.shots);
    inputs.topics = load_topics_file(config.topics);
    if (config.qrels) qrels = load_qrels_file(*config.qrels);
    if (config.features) features = load_features_file(*config.features);
    return 0;
  });

  const PipelineRuns runs = run_stages(inputs, settings, qrels ? &*qrels : nullptr,
                                       features ? &*features : nullptr);

  PipelineReport report;
  in_stage("write", "", [&] {
    fs::create_directories(config.output_dir);
    auto emit = [&](const std::string& name, const std::string& bytes) {
      const fs::path path = config.output_dir / name;
      write_file_atomic(path, bytes);
      report.written.push_back(path);
    };
    emit("config.json", config_to_json(config));
    for (std::size_t v = 0; v < runs.fused.size(); ++v) {
      emit("fused." + std::to_string(v) + ".run", write_runs(runs.fused[v], settings.depth));
    }
    for (std::size_t v = 0; v < runs.ste.size(); ++v) {
      emit("ste." + std::to_string(v) + ".run", write_runs(runs.ste[v], settings.depth));
    }
    emit("automatic.run", write_runs(runs.automatic, settings.depth));
    emit("final.run", write_runs(runs.final, settings.depth));

    json doc;
    doc["topics"] = inputs.topics.size();
    doc["variants"] = inputs.variants.size();
    doc["warnings"] = runs.warnings;
    json entries = json::object();
    for (const Ranking& r : runs.final) entries[r.topic_id] = r.entries.size();
    doc["final_entries"] = entries;
    if (!runs.aggregation.empty()) {
      json aggregation = json::object();
      for (const TopicAggregation& a : runs.aggregation) {
        aggregation[a.topic_id] = {
            {"alphas", a.alphas}, {"iterations", a.iterations}, {"converged", a.converged}};
      }
      doc["aggregation"] = aggregation;
    }
    if (qrels) {
      auto score = [&](const std::vector<Ranking>& rankings) {
        const EvalReport eval = evaluate(rankings, *qrels, settings.depth);
        json per_topic(eval.per_topic);
        return json{{"map", eval.map}, {"per_topic", per_topic}};
      };
      doc["eval"] = {{"automatic", score(runs.automatic)}, {"final", score(runs.final)}};
      report.map = doc["eval"]["final"]["map"].get<double>();
    }
    report.json = doc.dump(2) + "\n";
    emit("report.json", report.json);
    return 0;
  });
  return report;
}

}  // namespace insfuse
