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

#include <chrono>
#include <cmath>
#include <cstdio>

#include "cdseg/io.h"

namespace cdseg {

SessionStore::SessionStore(PipelineConfig default_config)
    : default_config_(std::move(default_config)),
      rng_(std::random_device{}()) {
  default_config_.validate();
}

SessionInfo SessionStore::create(const std::vector<std::uint8_t>& image_bytes,
                                 std::optional<PipelineConfig> config) {
  return create(decode_image(image_bytes), std::move(config));
}

SessionInfo SessionStore::create(Image8 image,
                                 std::optional<PipelineConfig> config) {
  auto session = std::make_shared<Session>();
  session->config = config ? std::move(*config) : default_config_;
  session->config.validate();
  auto prepared = std::make_shared<PreparedImage>(
      prepare_image(image, session->config));
  if (prepared->maps.empty()) {
    throw PipelineError("no (color space, k) map could be prepared");
  }
  SessionInfo info;
  info.superpixel_counts = prepared->superpixel_counts();
  info.checksum = prepared->checksum();
  session->cached = std::move(prepared);

  std::lock_guard<std::mutex> lock(mu_);
  info.id = new_id();
  sessions_.emplace(info.id, std::move(session));
  return info;
}

std::string SessionStore::new_id() {
  std::string id;
  do {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(rng_()));
    id = buf;
  } while (sessions_.count(id));
  return id;
}

std::shared_ptr<SessionStore::Session> SessionStore::find(
    const std::string& id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw UnknownSessionError("unknown session " + id);
  return it->second;
}

ScribbleResponse SessionStore::submit(const std::string& id,
                                      const ScribbleSet& scribbles) {
  auto session = find(id);
  std::lock_guard<std::mutex> lock(session->mu);
  const auto start = std::chrono::steady_clock::now();
  PipelineResult result = run_scribbles(*session->cached, scribbles, session->config);
  ScribbleResponse out;
  out.confidence = confidence_raster(result.mask.width(), result.mask.height(),
                                     result.agreement);
  out.mask = std::move(result.mask);
  out.ms = std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
               .count();
  session->last_mask = out.mask;
  return out;
}

ScribbleResponse SessionStore::submit_encoded(
    const std::string& id, const std::vector<std::uint8_t>& bytes) {
  auto session = find(id);
  return submit(id, decode_scribbles(bytes, session->config.n_cl));
}

std::optional<LabelMask> SessionStore::last_mask(const std::string& id) const {
  auto session = find(id);
  std::lock_guard<std::mutex> lock(session->mu);
  return session->last_mask;
}

bool SessionStore::erase(const std::string& id) {
  std::lock_guard<std::mutex> lock(mu_);
  return sessions_.erase(id) > 0;
}

std::size_t SessionStore::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return sessions_.size();
}

Image8 confidence_raster(int width, int height,
                         const std::vector<double>& agreement) {
  Image8 out(width, height, 1);
  for (std::size_t p = 0; p < agreement.size(); ++p) {
    out.data()[p] = static_cast<std::uint8_t>(
        std::lround(std::clamp(agreement[p], 0.0, 1.0) * 255.0));
  }
  return out;
}

}  // namespace cdseg
