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
#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <thread>

#include "fixtures.hpp"
#include "httplib.h"
#include "insfuse/http_service.hpp"
#include "insfuse/io.hpp"
#include "insfuse/session.hpp"
#include "json.hpp"

using namespace insfuse;
using nlohmann::json;

namespace {

constexpr int kShots = 30;

Ranking make_run(const std::string& topic) {
  Ranking r{topic, {}, "svc"};
  for (int i = 0; i < kShots; ++i) {
    r.entries.push_back({"s" + std::to_string(i), 1.0 - i / 100.0});
  }
  return r;
}

// Two loose clusters: even shots near e0, odd shots near e1.
FeatureTable make_features() {
  FeatureTable table;
  for (int i = 0; i < kShots; ++i) {
    const double wobble = 0.05 * std::sin(i);
    if (i % 2 == 0) {
      table.insert("s" + std::to_string(i), {1.0, 0.1 + wobble, 0.0});
    } else {
      table.insert("s" + std::to_string(i), {0.1 + wobble, 1.0, 0.0});
    }
  }
  return table;
}

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::filesystem::create_directories(dir_ / "assets");
    const std::vector<Ranking> runs{make_run("9301"), make_run("9302")};
    write_file_atomic(dir_ / "run.txt", write_runs(runs));
    std::ofstream(dir_ / "features.tsv") << [] {
      std::ostringstream out;
      write_features(make_features(), out);
      return out.str();
    }();
    write_file_atomic(dir_ / "assets" / "s3.jpg", std::string("\xff\xd8\xff\xe0jpeg", 8));

    store_ = std::make_unique<SessionStore>(dir_.path(), dir_ / "assets");
    mount_routes(server_, *store_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }

  void TearDown() override {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  std::pair<int, json> post(const std::string& path, const json& body) {
    auto res = client_->Post(path, body.dump(), "application/json");
    EXPECT_TRUE(res);
    return {res->status, json::parse(res->body)};
  }

  std::pair<int, std::string> get(const std::string& path) {
    auto res = client_->Get(path);
    EXPECT_TRUE(res);
    return {res->status, res->body};
  }

  std::string create(const json& strategy, const std::string& topic = "9301") {
    auto [status, body] = post("/sessions", {{"run", "run.txt"}, {"topic_id", topic},
                                             {"strategy", strategy}});
    EXPECT_EQ(status, 201) << body.dump();
    return body.value("session_id", "");
  }

  json labels(std::initializer_list<std::pair<const char*, const char*>> items) {
    json out = json::array();
    for (const auto& [shot, polarity] : items) {
      out.push_back({{"shot_id", shot}, {"polarity", polarity}});
    }
    return {{"labels", out}};
  }

  std::vector<std::string> ranking_ids(const std::string& session) {
    const json doc = json::parse(get("/sessions/" + session + "/ranking").second);
    std::vector<std::string> out;
    for (const json& e : doc["ranking"]) out.push_back(e["shot_id"]);
    return out;
  }

  fixtures::TempDir dir_;
  std::unique_ptr<SessionStore> store_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

TEST_F(ServiceTest, CreateTopKReturnsFirstUnlabeledShots) {
  auto [status, body] = post("/sessions", {{"run", "run.txt"},
                                           {"topic_id", "9301"},
                                           {"strategy", {{"kind", "topk"}, {"k", 5}}}});
  ASSERT_EQ(status, 201);
  EXPECT_EQ(body["recommendations"],
            (std::vector<std::string>{"s0", "s1", "s2", "s3", "s4"}));
  EXPECT_FALSE(body["session_id"].get<std::string>().empty());
}

TEST_F(ServiceTest, UnknownTopicIs404WithCode) {
  auto [status, body] =
      post("/sessions", {{"run", "run.txt"}, {"topic_id", "9999"}, {"strategy", {{"kind", "topk"}}}});
  EXPECT_EQ(status, 404);
  EXPECT_EQ(body["code"], "unknown_topic");
}

TEST_F(ServiceTest, UnknownRunIs404) {
  auto [status, body] =
      post("/sessions", {{"run", "nope.txt"}, {"topic_id", "9301"}, {"strategy", {{"kind", "topk"}}}});
  EXPECT_EQ(status, 404);
  EXPECT_EQ(body["code"], "unknown_run");
}

TEST_F(ServiceTest, PathLikeRunNameIsRejected) {
  auto [status, body] = post(
      "/sessions", {{"run", "../run.txt"}, {"topic_id", "9301"}, {"strategy", {{"kind", "topk"}}}});
  EXPECT_EQ(status, 400);
  EXPECT_EQ(body["code"], "bad_request");
}

TEST_F(ServiceTest, MissingFeatureFileIs422) {
  auto [status, body] =
      post("/sessions", {{"run", "run.txt"},
                         {"topic_id", "9301"},
                         {"strategy", {{"kind", "caaf"}, {"features", "absent.tsv"}}}});
  EXPECT_EQ(status, 422);
  EXPECT_EQ(body["code"], "missing_features");
}

TEST_F(ServiceTest, ShotWithoutFeatureIs422) {
  FeatureTable partial;
  partial.insert("s0", {1.0, 0.0});
  std::ostringstream out;
  write_features(partial, out);
  write_file_atomic(dir_ / "partial.tsv", out.str());
  auto [status, body] =
      post("/sessions", {{"run", "run.txt"},
                         {"topic_id", "9301"},
                         {"strategy", {{"kind", "caaf"}, {"features", "partial.tsv"}}}});
  EXPECT_EQ(status, 422);
  EXPECT_EQ(body["code"], "missing_features");
}

TEST_F(ServiceTest, MalformedBodyIs400) {
  auto res = client_->Post("/sessions", "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(json::parse(res->body)["code"], "bad_request");

  auto [status, body] =
      post("/sessions", {{"run", "run.txt"}, {"topic_id", "9301"}, {"strategy", {{"kind", "svm"}}}});
  EXPECT_EQ(status, 400);
}

TEST_F(ServiceTest, UnknownSessionIs404) {
  auto [status, body] = post("/sessions/zzz/labels", labels({{"s0", "positive"}}));
  EXPECT_EQ(status, 404);
  EXPECT_EQ(body["code"], "unknown_session");
  EXPECT_EQ(get("/sessions/zzz/ranking").first, 404);
  EXPECT_EQ(get("/sessions/zzz/export").first, 404);
}

TEST_F(ServiceTest, TopKPositiveFirstNegativeLast) {
  const std::string id = create({{"kind", "topk"}, {"k", 5}});
  auto [status, body] =
      post("/sessions/" + id + "/labels", labels({{"s3", "positive"}, {"s0", "negative"}}));
  ASSERT_EQ(status, 200);
  EXPECT_EQ(body["version"], 1);
  EXPECT_TRUE(body["rejected"].empty());
  const auto order = ranking_ids(id);
  ASSERT_EQ(order.size(), static_cast<std::size_t>(kShots));
  EXPECT_EQ(order.front(), "s3");
  EXPECT_EQ(order.back(), "s0");
  EXPECT_EQ(order[1], "s1");
  EXPECT_EQ(body["recommendations"], (std::vector<std::string>{"s1", "s2", "s4", "s5", "s6"}));
}

TEST_F(ServiceTest, TopPositiveStaysFirst) {
  const std::string id = create({{"kind", "topk"}});
  post("/sessions/" + id + "/labels", labels({{"s0", "positive"}, {"s7", "positive"}}));
  const auto order = ranking_ids(id);
  EXPECT_EQ(order[0], "s0");
  EXPECT_EQ(order[1], "s7");
}

TEST_F(ServiceTest, RepeatedBatchBumpsVersionOnly) {
  const std::string id = create({{"kind", "topk"}});
  post("/sessions/" + id + "/labels", labels({{"s4", "positive"}}));
  const std::string first = get("/sessions/" + id + "/export").second;
  auto [status, body] = post("/sessions/" + id + "/labels", labels({{"s4", "positive"}}));
  EXPECT_EQ(status, 200);
  EXPECT_EQ(body["version"], 2);
  EXPECT_EQ(get("/sessions/" + id + "/export").second, first);

  const json log = json::parse(get("/sessions/" + id + "/log").second);
  ASSERT_EQ(log["batches"].size(), 2u);
  EXPECT_EQ(log["batches"][0]["labels"].size(), 1u);
  EXPECT_TRUE(log["batches"][1]["labels"].empty());
  EXPECT_EQ(log["batches"][1]["version"], 2);
  EXPECT_GE(log["batches"][1]["round_seconds"].get<double>(), 0.0);
}

TEST_F(ServiceTest, RejectsBadPolarityAndUnknownShot) {
  const std::string id = create({{"kind", "topk"}});
  auto [status, body] = post("/sessions/" + id + "/labels",
                             labels({{"s1", "maybe"}, {"ghost", "positive"}, {"s2", "negative"}}));
  ASSERT_EQ(status, 200);
  ASSERT_EQ(body["rejected"].size(), 2u);
  EXPECT_EQ(body["rejected"][0]["shot_id"], "s1");
  EXPECT_EQ(body["rejected"][0]["reason"], "bad_polarity");
  EXPECT_EQ(body["rejected"][1]["shot_id"], "ghost");
  EXPECT_EQ(body["rejected"][1]["reason"], "unknown_shot");
  EXPECT_EQ(ranking_ids(id).back(), "s2");
}

TEST_F(ServiceTest, RankingLimit) {
  const std::string id = create({{"kind", "topk"}});
  const json doc = json::parse(get("/sessions/" + id + "/ranking?limit=3").second);
  EXPECT_EQ(doc["ranking"].size(), 3u);
  EXPECT_EQ(doc["topic_id"], "9301");
  EXPECT_EQ(doc["version"], 0);
  EXPECT_EQ(doc["session_id"], id);
  EXPECT_EQ(get("/sessions/" + id + "/ranking?limit=x").first, 400);
}

TEST_F(ServiceTest, ExportRoundTrips) {
  const std::string id = create({{"kind", "topk"}}, "9302");
  post("/sessions/" + id + "/labels", labels({{"s9", "positive"}}));
  auto [status, text] = get("/sessions/" + id + "/export");
  ASSERT_EQ(status, 200);
  EXPECT_EQ(text, write_run(store_->ranking(id).ranking));
  std::istringstream in(text);
  const auto runs = read_run(in);
  ASSERT_EQ(runs.size(), 1u);
  EXPECT_EQ(runs[0].topic_id, "9302");
  EXPECT_EQ(runs[0].run_tag, "svc");
  EXPECT_EQ(fixtures::ids(runs[0]), fixtures::ids(store_->ranking(id).ranking));
}

TEST_F(ServiceTest, UntouchedSessionExportsInputRun) {
  const std::string id = create({{"kind", "topk"}});
  EXPECT_EQ(get("/sessions/" + id + "/export").second, write_run(make_run("9301")));
}

TEST_F(ServiceTest, CaafPositiveGetsTopScore) {
  const std::string id = create({{"kind", "caaf"}, {"a_probe", 12}, {"batch", 4}});
  auto [status, body] = post("/sessions/" + id + "/labels", labels({{"s5", "positive"}}));
  ASSERT_EQ(status, 200);
  EXPECT_EQ(body["recommendations"].size(), 4u);
  for (const json& shot : body["recommendations"]) EXPECT_NE(shot, "s5");
  const json doc = json::parse(get("/sessions/" + id + "/ranking").second);
  bool found = false;
  for (const json& e : doc["ranking"]) {
    if (e["shot_id"] == "s5") {
      EXPECT_DOUBLE_EQ(e["score"].get<double>(), 1.0);
      found = true;
    }
  }
  EXPECT_TRUE(found);
  EXPECT_EQ(doc["ranking"].size(), static_cast<std::size_t>(kShots));
}

TEST_F(ServiceTest, KeyframeAssets) {
  auto [status, bytes] = get("/assets/keyframes/s3");
  EXPECT_EQ(status, 200);
  EXPECT_EQ(bytes.size(), 8u);
  auto missing = get("/assets/keyframes/s4");
  EXPECT_EQ(missing.first, 404);
  EXPECT_EQ(json::parse(missing.second)["code"], "unknown_asset");
}

TEST_F(ServiceTest, LogReplayReproducesExport) {
  for (const char* kind : {"topk", "caaf"}) {
    const std::string id = create({{"kind", kind}, {"a_probe", 12}, {"k", 10}});
    post("/sessions/" + id + "/labels", labels({{"s1", "positive"}, {"s2", "negative"}}));
    post("/sessions/" + id + "/labels", labels({{"s1", "positive"}}));
    post("/sessions/" + id + "/labels", labels({{"s2", "positive"}, {"s11", "negative"}}));

    const json log = json::parse(get("/sessions/" + id + "/log").second);
    const SessionInfo info = store_->info(id);
    const FeatureTable features = make_features();
    FeedbackSession replay(make_run("9301"), info.strategy, &features);
    for (const json& batch : log["batches"]) {
      std::vector<Label> batch_labels;
      for (const json& l : batch["labels"]) {
        batch_labels.push_back(
            Label{l["shot_id"], *parse_polarity(l["polarity"].get<std::string>())});
      }
      replay.post(batch_labels);
    }
    EXPECT_EQ(get("/sessions/" + id + "/export").second, write_run(replay.ranking())) << kind;
  }
}

TEST(FeedbackSession, VersionCountsEveryPost) {
  FeedbackSession session(fixtures::ranking("t", {"a", "b", "c"}), StrategySpec{}, nullptr);
  const std::vector<Label> none;
  session.post(none);
  const std::vector<Label> one{{"c", Polarity::kPositive}};
  const auto outcome = session.post(one);
  EXPECT_EQ(session.version(), 2);
  EXPECT_EQ(outcome.applied, one);
  EXPECT_EQ(fixtures::ids(session.ranking()), (std::vector<std::string>{"c", "a", "b"}));
}

TEST(FeedbackSession, FlippedLabelIsApplied) {
  FeedbackSession session(fixtures::ranking("t", {"a", "b", "c"}), StrategySpec{}, nullptr);
  const std::vector<Label> pos{{"a", Polarity::kPositive}};
  const std::vector<Label> neg{{"a", Polarity::kNegative}};
  session.post(pos);
  const auto outcome = session.post(neg);
  EXPECT_EQ(outcome.applied, neg);
  EXPECT_EQ(fixtures::ids(session.ranking()), (std::vector<std::string>{"b", "c", "a"}));
}

TEST(FeedbackSession, CaafWithoutFeaturesThrows) {
  StrategySpec spec;
  spec.kind = FeedbackKind::kCaaf;
  EXPECT_THROW(FeedbackSession(fixtures::ranking("t", {"a"}), spec, nullptr),
               std::invalid_argument);
}

TEST(CreateRequest, ParsesStrategyFields) {
  const CreateRequest r = parse_create_request(
      R"({"run":"r.txt","topic_id":"9","strategy":{"kind":"caaf","a_probe":15,"n_gallery":40,)"
      R"("beta":"auto","lambda":2.5,"batch":3,"features":"f.tsv"}})");
  EXPECT_EQ(r.run, "r.txt");
  EXPECT_EQ(r.strategy.kind, FeedbackKind::kCaaf);
  EXPECT_EQ(r.strategy.caaf.a_probe, 15u);
  EXPECT_EQ(r.strategy.caaf.n_gallery, 40u);
  EXPECT_FALSE(r.strategy.caaf.beta.has_value());
  EXPECT_DOUBLE_EQ(r.strategy.caaf.lambda, 2.5);
  EXPECT_EQ(r.strategy.caaf.batch, 3u);
  EXPECT_EQ(r.strategy.features, "f.tsv");

  try {
    parse_create_request(R"({"run":"r.txt","topic_id":"9","strategy":{"kind":"topk","mode":"x"}})");
    FAIL();
  } catch (const ServiceError& e) {
    EXPECT_EQ(e.status(), 400);
  }
}

}  // namespace
