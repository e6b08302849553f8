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

#include "insfuse/http_service.hpp"

#include "httplib.h"
#include "json.hpp"

namespace insfuse {
namespace {

using nlohmann::json;

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const ServiceError& e) {
  send_json(res, e.status(), json{{"code", e.code()}, {"message", e.what()}});
}

json parse_body(const std::string& body) {
  try {
    json doc = json::parse(body);
    if (!doc.is_object()) throw ServiceError(400, "bad_request", "body must be a JSON object");
    return doc;
  } catch (const json::exception& e) {
    throw ServiceError(400, "bad_request", e.what());
  }
}

template <typename Handler>
auto guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const ServiceError& e) {
      send_error(res, e);
    } catch (const json::exception& e) {
      send_error(res, ServiceError(400, "bad_request", e.what()));
    } catch (const std::exception& e) {
      send_error(res, ServiceError(500, "internal", e.what()));
    }
  };
}

json rejections_json(const std::vector<LabelRejection>& rejected) {
  json out = json::array();
  for (const auto& r : rejected) out.push_back({{"shot_id", r.shot_id}, {"reason", r.reason}});
  return out;
}

}  // namespace

CreateRequest parse_create_request(const std::string& body) {
  const json doc = parse_body(body);
  CreateRequest request;
  try {
    request.run = doc.at("run").get<std::string>();
    request.topic_id = doc.at("topic_id").get<std::string>();
    const json& strategy = doc.at("strategy");
    const auto kind = parse_feedback_kind(strategy.at("kind").get<std::string>());
    if (!kind) throw ServiceError(400, "bad_request", "strategy.kind must be topk or caaf");
    StrategySpec& spec = request.strategy;
    spec.kind = *kind;
    if (strategy.contains("k")) spec.topk.k = strategy["k"].get<std::size_t>();
    if (strategy.contains("mode")) {
      const auto mode = parse_topk_mode(strategy["mode"].get<std::string>());
      if (!mode) throw ServiceError(400, "bad_request", "unknown strategy.mode");
      spec.topk.mode = *mode;
    }
    CaafParams& caaf = spec.caaf;
    if (strategy.contains("a_probe")) caaf.a_probe = strategy["a_probe"].get<std::size_t>();
    if (strategy.contains("n_gallery")) caaf.n_gallery = strategy["n_gallery"].get<std::size_t>();
    if (strategy.contains("beta") && !strategy["beta"].is_string()) {
      caaf.beta = strategy["beta"].get<double>();
    }
    if (strategy.contains("lambda")) caaf.lambda = strategy["lambda"].get<double>();
    if (strategy.contains("batch")) caaf.batch = strategy["batch"].get<std::size_t>();
    if (strategy.contains("max_sweeps")) caaf.max_sweeps = strategy["max_sweeps"].get<int>();
    if (strategy.contains("tol")) caaf.tol = strategy["tol"].get<double>();
    if (strategy.contains("features")) spec.features = strategy["features"].get<std::string>();
  } catch (const json::exception& e) {
    throw ServiceError(400, "bad_request", e.what());
  }
  return request;
}

void mount_routes(httplib::Server& server, SessionStore& store) {
  server.Post("/sessions", guarded([&store](const httplib::Request& req, httplib::Response& res) {
                const CreateRequest request = parse_create_request(req.body);
                const CreateResult result =
                    store.create(request.run, request.topic_id, request.strategy);
                send_json(res, 201,
                          json{{"session_id", result.session_id},
                               {"recommendations", result.recommendations}});
              }));

  server.Post(R"(/sessions/([^/]+)/labels)",
              guarded([&store](const httplib::Request& req, httplib::Response& res) {
                const json doc = parse_body(req.body);
                std::vector<Label> labels;
                std::vector<LabelRejection> malformed;
                for (const json& item : doc.at("labels")) {
                  const std::string shot = item.at("shot_id").get<std::string>();
                  const auto polarity = parse_polarity(item.at("polarity").get<std::string>());
                  if (!polarity) {
                    malformed.push_back(LabelRejection{shot, "bad_polarity"});
                    continue;
                  }
                  labels.push_back(Label{shot, *polarity});
                }
                PostResult result = store.post_labels(req.matches[1], labels);
                malformed.insert(malformed.end(), result.rejected.begin(), result.rejected.end());
                send_json(res, 200,
                          json{{"version", result.version},
                               {"recommendations", result.recommendations},
                               {"rejected", rejections_json(malformed)}});
              }));

  server.Get(R"(/sessions/([^/]+)/ranking)",
             guarded([&store](const httplib::Request& req, httplib::Response& res) {
               std::optional<std::size_t> limit;
               if (req.has_param("limit")) {
                 try {
                   limit = std::stoul(req.get_param_value("limit"));
                 } catch (const std::exception&) {
                   throw ServiceError(400, "bad_request", "limit must be a non-negative integer");
                 }
               }
               const RankingSnapshot snapshot = store.ranking(req.matches[1], limit);
               json entries = json::array();
               for (const RankedShot& e : snapshot.ranking.entries) {
                 entries.push_back({{"shot_id", e.shot_id}, {"score", e.score}});
               }
               send_json(res, 200,
                         json{{"session_id", snapshot.session_id},
                              {"topic_id", snapshot.ranking.topic_id},
                              {"version", snapshot.version},
                              {"ranking", entries}});
             }));

  server.Get(R"(/sessions/([^/]+)/export)",
             guarded([&store](const httplib::Request& req, httplib::Response& res) {
               res.status = 200;
               res.set_content(store.export_run(req.matches[1]), "text/plain");
             }));

  server.Get(R"(/sessions/([^/]+)/log)",
             guarded([&store](const httplib::Request& req, httplib::Response& res) {
               json batches = json::array();
               for (const LabelBatch& batch : store.log(req.matches[1])) {
                 json labels = json::array();
                 for (const Label& l : batch.labels) {
                   labels.push_back(
                       {{"shot_id", l.shot_id}, {"polarity", std::string(to_string(l.polarity))}});
                 }
                 batches.push_back({{"version", batch.version},
                                    {"timestamp_ms", batch.timestamp_ms},
                                    {"round_seconds", batch.round_seconds},
                                    {"labels", labels}});
               }
               send_json(res, 200, json{{"batches", batches}});
             }));

  server.Get(R"(/assets/keyframes/([^/]+))",
             guarded([&store](const httplib::Request& req, httplib::Response& res) {
               const auto bytes = store.keyframe_asset(req.matches[1]);
               if (!bytes) {
                 throw ServiceError(404, "unknown_asset", "no keyframe for " +
                                                              std::string(req.matches[1]));
               }
               res.status = 200;
               res.set_content(*bytes, "image/jpeg");
             }));
}

}  // namespace insfuse
