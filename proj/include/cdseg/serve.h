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

// Interactive sessions: scribble-independent artifacts are computed once per
// image, and each scribble submission reruns only propagation and voting.

#ifndef CDSEG_SERVE_H_
#define CDSEG_SERVE_H_

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdseg/config.h"
#include "cdseg/image.h"
#include "cdseg/propagation.h"

namespace cdseg {

class UnknownSessionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SessionInfo {
  std::string id;
  std::vector<int> superpixel_counts;
  std::uint64_t checksum = 0;
};

struct ScribbleResponse {
  LabelMask mask;
  Image8 confidence;  // vote agreement scaled to [0, 255]
  double ms = 0.0;
};

class SessionStore {
 public:
  explicit SessionStore(PipelineConfig default_config = PipelineConfig::interactive());

  SessionInfo create(const std::vector<std::uint8_t>& image_bytes,
                     std::optional<PipelineConfig> config = std::nullopt);
  SessionInfo create(Image8 image,
                     std::optional<PipelineConfig> config = std::nullopt);

  // Throws UnknownSessionError, std::invalid_argument for bad scribbles and
  // PipelineError when no map survives.
  ScribbleResponse submit(const std::string& id, const ScribbleSet& scribbles);
  // Scribble PNG or stroke JSON bytes.
  ScribbleResponse submit_encoded(const std::string& id,
                                  const std::vector<std::uint8_t>& bytes);

  std::optional<LabelMask> last_mask(const std::string& id) const;
  bool erase(const std::string& id);
  std::size_t size() const;
  const PipelineConfig& default_config() const { return default_config_; }

 private:
  struct Session {
    PipelineConfig config;
    std::shared_ptr<const PreparedImage> cached;
    mutable std::mutex mu;  // serializes submissions
    std::optional<LabelMask> last_mask;
  };

  std::shared_ptr<Session> find(const std::string& id) const;
  std::string new_id();

  PipelineConfig default_config_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mt19937_64 rng_;
};

// Agreement fractions to an 8-bit gray raster.
Image8 confidence_raster(int width, int height,
                         const std::vector<double>& agreement);

}  // namespace cdseg

#endif  // CDSEG_SERVE_H_
