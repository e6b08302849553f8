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

// insfuse command line: detection extension, fusion, temporal extension,
// rank aggregation, feedback simulation, evaluation, pipeline runs, synthetic
// data and the session service.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "httplib.h"
#include "insfuse/detection_extension.hpp"
#include "insfuse/evaluation.hpp"
#include "insfuse/fusion.hpp"
#include "insfuse/http_service.hpp"
#include "insfuse/io.hpp"
#include "insfuse/pipeline.hpp"
#include "insfuse/rank_aggregation.hpp"
#include "insfuse/session.hpp"
#include "insfuse/simulation.hpp"
#include "insfuse/synthetic.hpp"
#include "insfuse/temporal_extension.hpp"

namespace fs = std::filesystem;
using namespace insfuse;

namespace {

std::set<std::string> split_topics(const std::string& list) {
  std::set<std::string> topics;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) topics.insert(item);
  }
  return topics;
}

std::optional<double> parse_auto(const std::string& text, const char* what) {
  if (text == "auto") return std::nullopt;
  try {
    return std::stod(text);
  } catch (const std::exception&) {
    throw CLI::ValidationError(std::string(what), "expected \"auto\" or a number");
  }
}

std::string format_ap(const std::optional<double>& ap) {
  if (!ap) return "-";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.4f", *ap);
  return buffer;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"insfuse: person-action instance search fusion and re-ranking"};
  app.require_subcommand(1);

  // ide
  auto* ide = app.add_subcommand("ide", "fill detection gaps by interpolation");
  std::string ide_in, ide_shots, ide_out;
  IdeParams ide_params;
  ide->add_option("--detections", ide_in)->required();
  ide->add_option("--shots", ide_shots)->required();
  ide->add_option("--max-gap", ide_params.max_gap)->capture_default_str();
  ide->add_option("-o,--out", ide_out)->required();
  ide->callback([&] {
    const auto table = apply_ide(load_detections_file(ide_in), load_shots_file(ide_shots),
                                 ide_params);
    std::ostringstream out;
    write_detections(table, out);
    write_file_atomic(ide_out, out.str());
  });

  // fuse
  auto* fuse = app.add_subcommand("fuse", "filter fusion of face and action detections");
  std::string fuse_dets, fuse_shots, fuse_topics, fuse_out, fuse_tag{kDefaultRunTag};
  FusionParams fusion;
  std::size_t fuse_depth = kDefaultRunDepth;
  fuse->add_option("--detections", fuse_dets)->required();
  fuse->add_option("--shots", fuse_shots)->required();
  fuse->add_option("--topics", fuse_topics)->required();
  fuse->add_option("--delta", fusion.delta)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  fuse->add_flag("--icv", fusion.icv_enabled);
  fuse->add_option("--tag", fuse_tag)->capture_default_str();
  fuse->add_option("--depth", fuse_depth)->capture_default_str();
  fuse->add_option("-o,--out", fuse_out, "output directory")->required();
  fuse->callback([&] {
    const auto detections = load_detections_file(fuse_dets);
    const auto shots = load_shots_file(fuse_shots);
    const auto topics = load_topics_file(fuse_topics);
    fs::create_directories(fuse_out);
    std::vector<Ranking> rankings;
    std::vector<std::string> warnings;
    for (const Topic& topic : topics) {
      rankings.push_back(fuse_topic(topic, detections, shots, fusion, &warnings, fuse_tag));
      write_file_atomic(fs::path(fuse_out) / (topic.topic_id + ".run"),
                        write_run(rankings.back(), fuse_depth));
    }
    write_file_atomic(fs::path(fuse_out) / "all.run", write_runs(rankings, fuse_depth));
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  });

  // ste
  auto* ste = app.add_subcommand("ste", "temporal score extension");
  std::string ste_run, ste_shots, ste_out, ste_topics;
  SteParams ste_params;
  ste->add_option("--run", ste_run)->required();
  ste->add_option("--shots", ste_shots)->required();
  ste->add_option("--theta", ste_params.theta)->capture_default_str();
  ste->add_option("--sigma", ste_params.sigma)->capture_default_str();
  ste->add_option("--p", ste_params.p)->capture_default_str();
  ste->add_option("--topics", ste_topics, "comma-separated topics (default: all)");
  ste->add_option("-o,--out", ste_out)->required();
  ste->callback([&] {
    if (!ste_topics.empty()) ste_params.enabled_topics = split_topics(ste_topics);
    const auto shots = load_shots_file(ste_shots);
    std::vector<Ranking> out;
    for (const Ranking& r : read_run_file(ste_run)) out.push_back(apply_ste(r, shots, ste_params));
    write_file_atomic(ste_out, write_runs(out));
  });

  // aggregate
  auto* aggregate = app.add_subcommand("aggregate", "robust rank aggregation");
  std::vector<std::string> agg_runs;
  std::string agg_sigma = "auto", agg_out, agg_tag{kDefaultRunTag};
  HqParams hq;
  bool agg_report = false;
  aggregate->add_option("--runs", agg_runs)->required()->expected(1, -1);
  aggregate->add_option("--sigma-hq", agg_sigma)->capture_default_str();
  aggregate->add_option("--epsilon", hq.epsilon)->capture_default_str();
  aggregate->add_option("--max-iters", hq.max_iters)->capture_default_str();
  aggregate->add_option("--tag", agg_tag)->capture_default_str();
  aggregate->add_flag("--report", agg_report, "print per-topic weights");
  aggregate->add_option("-o,--out", agg_out)->required();
  aggregate->callback([&] {
    hq.sigma_hq = parse_auto(agg_sigma, "--sigma-hq");
    std::vector<std::vector<Ranking>> inputs;
    std::vector<std::string> topics;
    for (const auto& path : agg_runs) {
      inputs.push_back(read_run_file(path));
      for (const Ranking& r : inputs.back()) {
        if (std::find(topics.begin(), topics.end(), r.topic_id) == topics.end()) {
          topics.push_back(r.topic_id);
        }
      }
    }
    std::vector<Ranking> out;
    for (const std::string& topic : topics) {
      std::vector<Ranking> lists;
      for (const auto& run : inputs) {
        auto it = std::find_if(run.begin(), run.end(),
                               [&](const Ranking& r) { return r.topic_id == topic; });
        lists.push_back(it == run.end() ? Ranking{topic, {}, agg_tag} : *it);
      }
      HqResult result = hq_aggregate(normalize_ranks(lists), hq, agg_tag);
      if (agg_report) {
        std::cout << topic << "\titerations=" << result.iterations
                  << "\tconverged=" << (result.converged ? "yes" : "no")
                  << "\tsigma_hq=" << format_number(result.sigma_hq) << "\talphas=";
        for (std::size_t m = 0; m < result.alphas.size(); ++m) {
          std::cout << (m ? "," : "") << format_number(result.alphas[m]);
        }
        std::cout << '\n';
      }
      out.push_back(std::move(result.consensus));
    }
    write_file_atomic(agg_out, write_runs(out));
  });

  // feedback simulate
  auto* feedback = app.add_subcommand("feedback", "interactive feedback");
  feedback->require_subcommand(1);
  auto* simulate = feedback->add_subcommand("simulate", "oracle-driven feedback rounds");
  std::string sim_run, sim_qrels, sim_features, sim_out, sim_report, sim_strategy = "topk",
                                                                     sim_mode = "both",
                                                                     sim_beta = "auto";
  FeedbackSettings sim;
  std::size_t sim_depth = kDefaultRunDepth;
  simulate->add_option("--run", sim_run)->required();
  simulate->add_option("--qrels", sim_qrels)->required();
  simulate->add_option("--strategy", sim_strategy)
      ->capture_default_str()
      ->check(CLI::IsMember({"topk", "caaf"}));
  simulate->add_option("--mode", sim_mode)
      ->capture_default_str()
      ->check(CLI::IsMember({"positive_only", "negative_only", "both"}));
  simulate->add_option("--k", sim.topk.k)->capture_default_str();
  simulate->add_option("--rounds", sim.rounds)->capture_default_str();
  simulate->add_option("--features", sim_features);
  simulate->add_option("--a-probe", sim.caaf.a_probe)->capture_default_str();
  simulate->add_option("--n-gallery", sim.caaf.n_gallery)->capture_default_str();
  simulate->add_option("--batch", sim.caaf.batch)->capture_default_str();
  simulate->add_option("--lambda", sim.caaf.lambda)->capture_default_str();
  simulate->add_option("--beta", sim_beta)->capture_default_str();
  simulate->add_option("--depth", sim_depth)->capture_default_str();
  simulate->add_option("-o,--out", sim_out)->required();
  simulate->add_option("--report", sim_report, "curves.tsv path");
  simulate->callback([&] {
    sim.kind = *parse_feedback_kind(sim_strategy);
    sim.topk.mode = *parse_topk_mode(sim_mode);
    sim.caaf.beta = parse_auto(sim_beta, "--beta");
    const Qrels qrels = load_qrels_file(sim_qrels);
    std::optional<FeatureTable> features;
    if (!sim_features.empty()) features = load_features_file(sim_features);
    if (sim.kind == FeedbackKind::kCaaf && !features) {
      throw CLI::ValidationError("--features", "required for --strategy caaf");
    }
    std::vector<Ranking> out;
    std::string curves = "topic\tround\tlabels_used\tAP\n";
    for (const Ranking& r : read_run_file(sim_run)) {
      SimulationResult result =
          simulate_feedback(r, qrels, features ? &*features : nullptr, sim, sim_depth);
      for (const CurvePoint& p : result.curve) {
        curves += r.topic_id + "\t" + std::to_string(p.round) + "\t" +
                  std::to_string(p.labels_used) + "\t" + format_ap(p.ap) + "\n";
      }
      out.push_back(std::move(result.ranking));
    }
    write_file_atomic(sim_out, write_runs(out, sim_depth));
    if (!sim_report.empty()) write_file_atomic(sim_report, curves);
  });

  // eval
  auto* eval = app.add_subcommand("eval", "average precision of a run");
  std::string eval_run, eval_qrels;
  std::size_t eval_depth = kDefaultRunDepth;
  bool per_topic = false;
  eval->add_option("--run", eval_run)->required();
  eval->add_option("--qrels", eval_qrels)->required();
  eval->add_option("--depth", eval_depth)->capture_default_str();
  eval->add_flag("--per-topic", per_topic);
  eval->callback([&] {
    const auto runs = read_run_file(eval_run);
    std::cout << format_report(evaluate(runs, load_qrels_file(eval_qrels), eval_depth), per_topic);
  });

  // run
  auto* run = app.add_subcommand("run", "end-to-end pipeline from a config file");
  std::string run_config;
  std::optional<std::string> run_out, run_tag;
  std::optional<double> run_delta, run_theta, run_sigma;
  std::optional<int> run_p;
  std::optional<Keyframe> run_max_gap;
  std::optional<bool> run_ide, run_icv, run_ste, run_aggregate;
  run->add_option("--config", run_config)->required();
  run->add_option("--out", run_out);
  run->add_option("--tag", run_tag);
  run->add_option("--delta", run_delta);
  run->add_option("--theta", run_theta);
  run->add_option("--sigma", run_sigma);
  run->add_option("--p", run_p);
  run->add_option("--max-gap", run_max_gap);
  run->add_option("--ide", run_ide, "true/false");
  run->add_option("--icv", run_icv, "true/false");
  run->add_option("--ste", run_ste, "true/false");
  run->add_option("--aggregate", run_aggregate, "true/false");
  run->callback([&] {
    PipelineConfig config = load_config(run_config);
    PipelineSettings& s = config.settings;
    if (run_out) config.output_dir = *run_out;
    if (run_tag) s.run_tag = *run_tag;
    if (run_delta) s.fusion.delta = *run_delta;
    if (run_theta) s.ste.theta = *run_theta;
    if (run_sigma) s.ste.sigma = *run_sigma;
    if (run_p) s.ste.p = *run_p;
    if (run_max_gap) s.ide.max_gap = *run_max_gap;
    if (run_ide) s.stages.ide = *run_ide;
    if (run_icv) s.stages.icv = *run_icv;
    if (run_ste) s.stages.ste = *run_ste;
    if (run_aggregate) s.stages.aggregate = *run_aggregate;
    const PipelineReport report = run_pipeline(config);
    for (const auto& path : report.written) std::cout << "wrote " << path.string() << '\n';
    if (report.map) std::cout << "mAP\t" << format_ap(report.map) << '\n';
  });

  // synth
  auto* synth = app.add_subcommand("synth", "generate a seeded synthetic dataset");
  SyntheticSpec spec;
  std::string synth_out;
  synth->add_option("--seed", spec.seed)->capture_default_str();
  synth->add_option("--out", synth_out)->required();
  synth->add_option("--videos", spec.videos)->capture_default_str();
  synth->add_option("--shots-per-video", spec.shots_per_video)->capture_default_str();
  synth->add_option("--keyframes-per-shot", spec.keyframes_per_shot)->capture_default_str();
  synth->add_option("--persons", spec.persons)->capture_default_str();
  synth->add_option("--actions", spec.actions)->capture_default_str();
  synth->add_option("--topics", spec.topics)->capture_default_str();
  synth->add_option("--relevance-rate", spec.relevance_rate)->capture_default_str();
  synth->add_option("--detector-noise", spec.detector_noise)->capture_default_str();
  synth->add_option("--dropout-rate", spec.dropout_rate)->capture_default_str();
  synth->add_option("--feature-dim", spec.feature_dim)->capture_default_str();
  synth->add_option("--feature-noise", spec.feature_noise)->capture_default_str();
  synth->add_option("--action-run-length", spec.action_run_length)->capture_default_str();
  synth->add_option("--variants", spec.variants)->capture_default_str();
  synth->callback([&] { synth_generate(spec, synth_out); });

  // serve
  auto* serve = app.add_subcommand("serve", "HTTP session service for interactive feedback");
  int port = 8080;
  std::string host = "0.0.0.0", data_dir, assets_dir;
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--data", data_dir)->required();
  serve->add_option("--assets", assets_dir);
  serve->callback([&] {
    SessionStore store(data_dir, assets_dir.empty() ? std::nullopt
                                                    : std::optional<fs::path>(assets_dir));
    httplib::Server server;
    mount_routes(server, store);
    std::cerr << "listening on " << host << ":" << port << '\n';
    if (!server.listen(host, port)) throw std::runtime_error("cannot listen on port " + std::to_string(port));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const StageError& e) {
    std::cerr << "error [" << e.stage() << "]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
