/* Copyright 2026 The cdseg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "cdseg/http_service.h"

#include <gtest/gtest.h>

#include <thread>

#include "cdseg/base64.h"
#include "cdseg/fixtures.h"
#include "cdseg/io.h"
#include "httplib.h"
#include "json.hpp"

namespace cdseg {
namespace {

using nlohmann::json;

class HttpServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    service_ = std::make_unique<HttpService>(store_);
    port_ = service_->bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { service_->listen_after_bind(); });
    service_->wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  void TearDown() override {
    service_->stop();
    thread_.join();
  }

  httplib::Result post(const std::string& path, const json& body) {
    return client_->Post(path, body.dump(), "application/json");
  }

  std::string create_session(const Image8& image) {
    auto res = post("/sessions", {{"image_png", base64_encode(encode_png(image))}});
    EXPECT_TRUE(res);
    EXPECT_EQ(res->status, 201);
    return json::parse(res->body).at("id").get<std::string>();
  }

  SessionStore store_;
  std::unique_ptr<HttpService> service_;
  int port_ = 0;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

TEST_F(HttpServiceTest, FullRoundTrip) {
  const SyntheticFixture fx = make_three_region_fixture();
  auto created = post("/sessions", {{"image_png", base64_encode(encode_png(fx.image))}});
  ASSERT_TRUE(created);
  ASSERT_EQ(created->status, 201);
  const json info = json::parse(created->body);
  const std::string id = info.at("id");
  EXPECT_EQ(info.at("superpixel_counts").size(), 4u);

  auto none = client_->Get("/sessions/" + id + "/mask");
  ASSERT_TRUE(none);
  EXPECT_EQ(none->status, 404);

  const std::string scribbles = base64_encode(encode_png(scribbles_to_png_raster(fx.scribbles)));
  auto res = post("/sessions/" + id + "/scribbles", {{"scribbles_png", scribbles}});
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200) << res->body;
  const json out = json::parse(res->body);
  const LabelMask mask = decode_mask(base64_decode(out.at("mask_png").get<std::string>()));
  EXPECT_EQ(mask, full_pipeline(fx.image, fx.scribbles, PipelineConfig::interactive()).mask);
  const Image8 conf = decode_png(base64_decode(out.at("confidence_png").get<std::string>()));
  EXPECT_EQ(conf.width(), 96);
  EXPECT_EQ(conf.channels(), 1);
  EXPECT_GE(out.at("ms").get<double>(), 0.0);

  auto via_strokes =
      post("/sessions/" + id + "/scribbles", {{"strokes", json::parse(format_strokes(fx.strokes))}});
  ASSERT_TRUE(via_strokes);
  ASSERT_EQ(via_strokes->status, 200) << via_strokes->body;
  EXPECT_EQ(json::parse(via_strokes->body).at("mask_png"), out.at("mask_png"));

  auto last = client_->Get("/sessions/" + id + "/mask");
  ASSERT_TRUE(last);
  ASSERT_EQ(last->status, 200);
  EXPECT_EQ(json::parse(last->body).at("mask_png"), out.at("mask_png"));

  auto del = client_->Delete("/sessions/" + id);
  ASSERT_TRUE(del);
  EXPECT_EQ(del->status, 204);
  auto gone = post("/sessions/" + id + "/scribbles", {{"scribbles_png", scribbles}});
  ASSERT_TRUE(gone);
  EXPECT_EQ(gone->status, 404);
}

TEST_F(HttpServiceTest, FullGridSession) {
  const SyntheticFixture fx = make_three_region_fixture();
  auto res = post("/sessions",
                  {{"image_png", base64_encode(encode_png(fx.image))}, {"grid", "full"}});
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 201);
  EXPECT_EQ(json::parse(res->body).at("superpixel_counts").size(), 20u);
  auto bad = post("/sessions", {{"image_png", base64_encode(encode_png(fx.image))}, {"grid", "huge"}});
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
}

TEST_F(HttpServiceTest, BadRequests) {
  auto not_json = client_->Post("/sessions", "{oops", "application/json");
  ASSERT_TRUE(not_json);
  EXPECT_EQ(not_json->status, 400);
  auto bad_png = post("/sessions", {{"image_png", base64_encode({1, 2, 3})}});
  ASSERT_TRUE(bad_png);
  EXPECT_EQ(bad_png->status, 400);

  const SyntheticFixture fx = make_three_region_fixture();
  const std::string id = create_session(fx.image);
  Image8 empty(96, 96, 1);
  for (auto& v : empty.data()) v = 255;
  auto no_scribbles =
      post("/sessions/" + id + "/scribbles", {{"scribbles_png", base64_encode(encode_png(empty))}});
  ASSERT_TRUE(no_scribbles);
  EXPECT_EQ(no_scribbles->status, 400);
  empty.at(3, 3, 0) = 30;  // class id >= 21
  auto bad_class =
      post("/sessions/" + id + "/scribbles", {{"scribbles_png", base64_encode(encode_png(empty))}});
  ASSERT_TRUE(bad_class);
  EXPECT_EQ(bad_class->status, 400);
  auto missing = post("/sessions/" + id + "/scribbles", json::object());
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 400);
  auto unknown = client_->Delete("/sessions/ffffffffffffffff");
  ASSERT_TRUE(unknown);
  EXPECT_EQ(unknown->status, 404);
}

TEST(Base64, RoundTrip) {
  for (std::size_t n = 0; n < 10; ++n) {
    std::vector<std::uint8_t> bytes(n);
    for (std::size_t i = 0; i < n; ++i) bytes[i] = static_cast<std::uint8_t>(i * 37 + 1);
    EXPECT_EQ(base64_decode(base64_encode(bytes)), bytes);
  }
  EXPECT_EQ(base64_encode({'M', 'a'}), "TWE=");
  EXPECT_THROW(base64_decode("@@@"), std::invalid_argument);
}

}  // namespace
}  // namespace cdseg
