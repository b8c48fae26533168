// Copyright 2026 The Bubble Audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bubble_audit/annotation_server.h"

#include <memory>
#include <string>

#include "bubble_audit/annotation_service.h"
#include "gtest/gtest.h"
#include "httplib.h"
#include "json.hpp"
#include "test_util.h"

namespace bubble_audit {
namespace {

using nlohmann::json;

struct Reply {
  int status = 0;
  json body;
};

class AnnotationServerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::vector<QueueEntry> queue;
    for (const char* id : {"v1", "v2"}) {
      QueueEntry e;
      e.video_id = id;
      e.appearance_count = id[1] == '1' ? 5 : 2;
      e.contexts.push_back({ListKind::kSearch, "flat earth", 3});
      queue.push_back(e);
    }
    service_ = std::make_unique<AnnotationService>(
        queue, std::map<std::string, VideoMeta>{{"v1", {"One", "c1"}}}, store_,
        clock_, AnnotationServiceOptions{std::chrono::minutes(30), 1});
    server_ = std::make_unique<AnnotationServer>(*service_);
    ASSERT_OK(server_->Start("127.0.0.1", 0));
    client_ = std::make_unique<httplib::Client>("127.0.0.1", server_->port());
  }

  void TearDown() override { server_->Stop(); }

  static Reply Wrap(const httplib::Result& r) {
    if (!r) return Reply{-1, json()};
    return Reply{r->status, json::parse(r->body, nullptr, false)};
  }

  Reply Get(const std::string& path) { return Wrap(client_->Get(path)); }
  Reply Post(const std::string& path, const std::string& body) {
    return Wrap(client_->Post(path, body, "application/json"));
  }
  Reply Next(const std::string& who) {
    return Get("/api/queue/next?annotator=" + who);
  }

  AnnotationStore store_;
  VirtualClock clock_;
  std::unique_ptr<AnnotationService> service_;
  std::unique_ptr<AnnotationServer> server_;
  std::unique_ptr<httplib::Client> client_;
};

TEST_F(AnnotationServerTest, QueueLeaseAndSubmit) {
  Reply r = Next("alice");
  ASSERT_EQ(r.status, 200);
  EXPECT_FALSE(r.body["empty"].get<bool>());
  EXPECT_EQ(r.body["item"]["video_id"], "v1");
  EXPECT_EQ(r.body["item"]["title"], "One");
  EXPECT_EQ(r.body["item"]["appearance_count"], 5);
  EXPECT_EQ(r.body["item"]["contexts"][0]["source"], "flat earth");
  EXPECT_EQ(r.body["item"]["contexts"][0]["list_kind"], "SEARCH");

  r = Next("bob");
  EXPECT_EQ(r.body["item"]["video_id"], "v2");

  r = Post("/api/annotations",
           R"({"annotator_id":"alice","video_id":"v1","code":1,"comment":"x"})");
  ASSERT_EQ(r.status, 200) << r.body.dump();
  EXPECT_EQ(r.body["record"]["code"], 1);
  EXPECT_EQ(store_.Get("v1", "alice")->comment, "x");

  r = Next("carol");
  ASSERT_EQ(r.status, 200);
  EXPECT_TRUE(r.body["empty"].get<bool>());
  EXPECT_TRUE(r.body["item"].is_null());
}

TEST_F(AnnotationServerTest, ErrorStatuses) {
  EXPECT_EQ(Get("/api/queue/next").status, 400);
  ASSERT_EQ(Next("alice").status, 200);

  Reply r = Post("/api/annotations", "not json");
  EXPECT_EQ(r.status, 400);
  EXPECT_TRUE(r.body.contains("error"));
  EXPECT_EQ(Post("/api/annotations", R"({"annotator_id":"alice","code":1})")
                .status,
            400);
  EXPECT_EQ(Post("/api/annotations",
                 R"({"annotator_id":"alice","video_id":"v1","code":"one"})")
                .status,
            400);
  EXPECT_EQ(Post("/api/annotations",
                 R"({"annotator_id":"alice","video_id":"v1","code":12})")
                .status,
            400);
  EXPECT_EQ(Post("/api/annotations",
                 R"({"annotator_id":"alice","video_id":"v9","code":1})")
                .status,
            404);
  // No lease on v2.
  EXPECT_EQ(Post("/api/annotations",
                 R"({"annotator_id":"alice","video_id":"v2","code":1})")
                .status,
            409);
  EXPECT_EQ(Get("/api/videos/unknown").status, 404);
  EXPECT_EQ(Post("/api/backcheck/resolve",
                 R"({"video_id":"v1","resolved_code":1,"resolver_id":"bob"})")
                .status,
            404);
}

TEST_F(AnnotationServerTest, LeaseExpiryHandsItemToSomeoneElse) {
  ASSERT_EQ(Next("alice").body["item"]["video_id"], "v1");
  ASSERT_EQ(Next("bob").body["item"]["video_id"], "v2");
  clock_.Advance(std::chrono::minutes(31));
  EXPECT_EQ(Next("carol").body["item"]["video_id"], "v1");
  EXPECT_EQ(Post("/api/annotations",
                 R"({"annotator_id":"alice","video_id":"v1","code":1})")
                .status,
            409);
}

TEST_F(AnnotationServerTest, BackcheckFlow) {
  ASSERT_EQ(Next("alice").status, 200);
  ASSERT_EQ(Post("/api/annotations",
                 R"({"annotator":"alice","video_id":"v1","code":3,"hesitation":true})")
                .status,
            200);
  Reply pending = Get("/api/backcheck/pending");
  ASSERT_EQ(pending.status, 200);
  ASSERT_EQ(pending.body["items"].size(), 1u);
  EXPECT_EQ(pending.body["items"][0]["backcheck_status"], "pending");

  EXPECT_EQ(Post("/api/backcheck/resolve",
                 R"({"video_id":"v1","resolved_code":1,"resolver_id":"alice"})")
                .status,
            400);
  Reply resolved = Post("/api/backcheck/resolve",
                        R"({"video_id":"v1","resolved_code":1,"resolver":"bob"})");
  ASSERT_EQ(resolved.status, 200) << resolved.body.dump();
  EXPECT_EQ(resolved.body["record"]["resolver_id"], "bob");
  EXPECT_EQ(Post("/api/backcheck/resolve",
                 R"({"video_id":"v1","resolved_code":1,"resolver_id":"bob"})")
                .status,
            409);
  EXPECT_TRUE(Get("/api/backcheck/pending").body["items"].empty());

  Reply video = Get("/api/videos/v1");
  ASSERT_EQ(video.status, 200);
  EXPECT_EQ(video.body["channel_id"], "c1");
  EXPECT_EQ(video.body["queue"]["appearance_count"], 5);
  ASSERT_EQ(video.body["annotations"].size(), 1u);
  EXPECT_EQ(video.body["annotations"][0]["resolved_code"], 1);
}

TEST_F(AnnotationServerTest, AgreementWithoutPairs) {
  Reply r = Get("/api/agreement");
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["paired_videos"], 0);
  EXPECT_TRUE(r.body["stance"].is_null());
}

}  // namespace
}  // namespace bubble_audit
