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

#include "cdseg/serve.h"

#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <thread>

#include "cdseg/fixtures.h"
#include "cdseg/io.h"

namespace cdseg {
namespace {

ScribbleSet without_class(const ScribbleSet& scr, int drop) {
  std::vector<int> labels = scr.labels();
  for (int& l : labels) if (l == drop) l = kNoClass;
  return ScribbleSet(scr.width(), scr.height(), labels);
}

TEST(SessionStore, CreateTwiceGivesDistinctIdsSameArtifacts) {
  SessionStore store;
  const SyntheticFixture fx = make_three_region_fixture();
  const auto png = encode_png(fx.image);
  const SessionInfo a = store.create(png);
  const SessionInfo b = store.create(png);
  EXPECT_NE(a.id, b.id);
  EXPECT_EQ(a.checksum, b.checksum);
  EXPECT_EQ(a.superpixel_counts, b.superpixel_counts);
  EXPECT_EQ(a.superpixel_counts.size(), 4u);
  EXPECT_EQ(store.size(), 2u);
}

TEST(SessionStore, InvalidImage) {
  SessionStore store;
  EXPECT_THROW(store.create(std::vector<std::uint8_t>{0x89, 'P', 'N', 'G'}), IoError);
  EXPECT_EQ(store.size(), 0u);
}

TEST(SessionStore, SubmitIsRepeatableAndMatchesBatch) {
  SessionStore store;
  const SyntheticFixture fx = make_three_region_fixture();
  const SessionInfo info = store.create(fx.image);
  EXPECT_FALSE(store.last_mask(info.id).has_value());
  const ScribbleResponse first = store.submit(info.id, fx.scribbles);
  const ScribbleResponse second = store.submit(info.id, fx.scribbles);
  EXPECT_EQ(first.mask, second.mask);
  EXPECT_EQ(first.confidence, second.confidence);
  EXPECT_GE(first.ms, 0.0);
  const PipelineResult batch = full_pipeline(fx.image, fx.scribbles, store.default_config());
  EXPECT_EQ(first.mask, batch.mask);
  EXPECT_EQ(first.confidence, confidence_raster(96, 96, batch.agreement));
  EXPECT_EQ(store.last_mask(info.id), first.mask);
}

TEST(SessionStore, FullGridOnRequest) {
  SessionStore store;
  const SyntheticFixture fx = make_three_region_fixture();
  const SessionInfo info = store.create(fx.image, PipelineConfig{});
  EXPECT_EQ(info.superpixel_counts.size(), 20u);
  EXPECT_EQ(store.submit(info.id, fx.scribbles).mask,
            full_pipeline(fx.image, fx.scribbles, PipelineConfig{}).mask);
}

TEST(SessionStore, CorrectiveScribbleFlipsRegion) {
  SessionStore store;
  const SyntheticFixture fx = make_three_region_fixture();
  const SessionInfo info = store.create(fx.image);
  const LabelMask before = store.submit(info.id, without_class(fx.scribbles, 2)).mask;
  const LabelMask after = store.submit(info.id, fx.scribbles).mask;
  int region = 0, wrong_before = 0, right_after = 0;
  for (int p = 0; p < 96 * 96; ++p) {
    if (fx.ground_truth.label_at(p) != 2) continue;
    ++region;
    wrong_before += before.label_at(p) != 2;
    right_after += after.label_at(p) == 2;
  }
  EXPECT_EQ(wrong_before, region);
  EXPECT_GE(right_after, 0.97 * region);
}

TEST(SessionStore, Errors) {
  SessionStore store;
  const SyntheticFixture fx = make_three_region_fixture();
  EXPECT_THROW(store.submit("nope", fx.scribbles), UnknownSessionError);
  PipelineConfig small = PipelineConfig::interactive();
  small.n_cl = 2;
  const SessionInfo info = store.create(fx.image, small);
  EXPECT_THROW(store.submit(info.id, fx.scribbles), std::invalid_argument);
  const ScribbleSet none(96, 96, std::vector<int>(96 * 96, kNoClass));
  EXPECT_THROW(store.submit(info.id, none), std::invalid_argument);
  EXPECT_TRUE(store.erase(info.id));
  EXPECT_FALSE(store.erase(info.id));
  EXPECT_THROW(store.submit(info.id, fx.scribbles), UnknownSessionError);
}

TEST(SessionStore, EncodedPayloads) {
  SessionStore store;
  const SyntheticFixture fx = make_three_region_fixture();
  const SessionInfo info = store.create(fx.image);
  const std::string json = format_strokes(fx.strokes);
  const LabelMask from_json =
      store.submit_encoded(info.id, std::vector<std::uint8_t>(json.begin(), json.end())).mask;
  const LabelMask from_png =
      store.submit_encoded(info.id, encode_png(scribbles_to_png_raster(fx.scribbles))).mask;
  EXPECT_EQ(from_json, from_png);
}

TEST(SessionStore, SessionsAreIsolated) {
  SessionStore store;
  const SyntheticFixture a = make_three_region_fixture(1);
  const SyntheticFixture b = make_three_region_fixture(2);
  const SessionInfo ia = store.create(a.image);
  const SessionInfo ib = store.create(b.image);
  const LabelMask want_a = full_pipeline(a.image, a.scribbles, store.default_config()).mask;
  const LabelMask want_b =
      full_pipeline(b.image, without_class(b.scribbles, 1), store.default_config()).mask;
  std::vector<std::thread> threads;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int r = 0; r < 3; ++r) {
        if (t % 2 == 0) {
          mismatches += store.submit(ia.id, a.scribbles).mask != want_a;
        } else {
          mismatches += store.submit(ib.id, without_class(b.scribbles, 1)).mask != want_b;
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(mismatches.load(), 0);
  EXPECT_EQ(store.last_mask(ia.id), want_a);
  EXPECT_EQ(store.last_mask(ib.id), want_b);
}

TEST(SessionStore, CachedRoundTripIsCheaperThanColdRun) {
  PipelineConfig cfg = PipelineConfig::interactive();
  cfg.color_spaces = {ColorSpace::kLab};
  cfg.k_values = {300};
  SessionStore store(cfg);
  const SyntheticFixture fx = make_three_region_fixture();
  const SessionInfo info = store.create(fx.image);
  using clock = std::chrono::steady_clock;
  double cold = 1e300, warm = 1e300;
  for (int r = 0; r < 5; ++r) {
    auto t0 = clock::now();
    const LabelMask m = segment_single(fx.image, fx.scribbles, ColorSpace::kLab,
                                       FhParams{300, 0.8, 20}, cfg);
    cold = std::min(cold, std::chrono::duration<double>(clock::now() - t0).count());
    t0 = clock::now();
    const LabelMask w = store.submit(info.id, fx.scribbles).mask;
    warm = std::min(warm, std::chrono::duration<double>(clock::now() - t0).count());
    EXPECT_EQ(m, w);
  }
  EXPECT_LT(warm, cold);
}

TEST(ConfidenceRaster, Scales) {
  const Image8 r = confidence_raster(3, 1, {0.0, 0.5, 1.0});
  EXPECT_EQ(r.at(0, 0, 0), 0);
  EXPECT_EQ(r.at(1, 0, 0), 128);
  EXPECT_EQ(r.at(2, 0, 0), 255);
}

}  // namespace
}  // namespace cdseg
