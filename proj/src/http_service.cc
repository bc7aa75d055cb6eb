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

#include <chrono>
#include <thread>

#include "cdseg/base64.h"
#include "cdseg/io.h"
#include "httplib.h"
#include "json.hpp"

namespace cdseg {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& msg) {
  send_json(res, status, {{"error", msg}});
}

// Maps exceptions from the store to HTTP status codes.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const UnknownSessionError& e) {
    send_error(res, 404, e.what());
  } catch (const PipelineError& e) {
    send_error(res, 422, e.what());
  } catch (const json::exception& e) {
    send_error(res, 400, std::string("malformed request: ") + e.what());
  } catch (const std::invalid_argument& e) {
    send_error(res, 400, e.what());
  } catch (const IoError& e) {
    send_error(res, 400, e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, e.what());
  }
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

HttpService::HttpService(SessionStore& store)
    : store_(store), server_(std::make_unique<httplib::Server>()) {
  auto& srv = *server_;

  srv.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = json::parse(req.body);
      const auto image = base64_decode(body.at("image_png").get<std::string>());
      std::optional<PipelineConfig> cfg;
      const std::string grid = body.value("grid", std::string("interactive"));
      if (grid == "full") {
        PipelineConfig full = store_.default_config();
        const PipelineConfig defaults;
        full.color_spaces = defaults.color_spaces;
        full.k_values = defaults.k_values;
        cfg = full;
      } else if (grid != "interactive") {
        throw std::invalid_argument("grid must be 'interactive' or 'full'");
      }
      const SessionInfo info = store_.create(image, cfg);
      send_json(res, 201,
                {{"id", info.id},
                 {"superpixel_counts", info.superpixel_counts},
                 {"checksum", hex(info.checksum)}});
    });
  });

  srv.Post(R"(/sessions/([0-9a-f]+)/scribbles)",
           [this](const httplib::Request& req, httplib::Response& res) {
             guarded(res, [&] {
               const std::string id = req.matches[1];
               const json body = json::parse(req.body);
               std::vector<std::uint8_t> payload;
               if (body.contains("scribbles_png")) {
                 payload = base64_decode(body.at("scribbles_png").get<std::string>());
               } else if (body.contains("strokes")) {
                 const std::string text = body.at("strokes").dump();
                 payload.assign(text.begin(), text.end());
               } else {
                 throw std::invalid_argument(
                     "expected 'scribbles_png' or 'strokes'");
               }
               const ScribbleResponse out = store_.submit_encoded(id, payload);
               send_json(res, 200,
                         {{"mask_png", base64_encode(encode_mask(out.mask))},
                          {"confidence_png", base64_encode(encode_png(out.confidence))},
                          {"ms", out.ms}});
             });
           });

  srv.Get(R"(/sessions/([0-9a-f]+)/mask)",
          [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
              const auto mask = store_.last_mask(req.matches[1]);
              if (!mask) {
                send_error(res, 404, "no mask computed yet");
                return;
              }
              send_json(res, 200, {{"mask_png", base64_encode(encode_mask(*mask))}});
            });
          });

  srv.Delete(R"(/sessions/([0-9a-f]+))",
             [this](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 if (!store_.erase(req.matches[1])) {
                   throw UnknownSessionError("unknown session " +
                                             std::string(req.matches[1]));
                 }
                 res.status = 204;
               });
             });
}

HttpService::~HttpService() { stop(); }

bool HttpService::listen(const std::string& host, int port) {
  return server_->listen(host, port);
}

int HttpService::bind_to_any_port(const std::string& host) {
  return server_->bind_to_any_port(host);
}

bool HttpService::listen_after_bind() { return server_->listen_after_bind(); }

void HttpService::stop() {
  if (server_) server_->stop();
}

void HttpService::wait_until_ready() const {
  while (!server_->is_running()) {
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
}

}  // namespace cdseg
