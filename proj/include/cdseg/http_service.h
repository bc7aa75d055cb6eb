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

// JSON-over-HTTP front end for SessionStore.
//
//   POST   /sessions                {"image_png": b64, "grid": "interactive"|"full"}
//                                   -> {"id", "superpixel_counts", "checksum"}
//   POST   /sessions/{id}/scribbles {"scribbles_png": b64} or {"strokes": doc}
//                                   -> {"mask_png", "confidence_png", "ms"}
//   GET    /sessions/{id}/mask      -> {"mask_png"}
//   DELETE /sessions/{id}

#ifndef CDSEG_HTTP_SERVICE_H_
#define CDSEG_HTTP_SERVICE_H_

#include <memory>
#include <string>

#include "cdseg/serve.h"

namespace httplib {
class Server;
}

namespace cdseg {

class HttpService {
 public:
  explicit HttpService(SessionStore& store);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  // Blocks until stop().
  bool listen(const std::string& host, int port);
  // Binds an ephemeral port and returns it (-1 on failure); follow with
  // listen_after_bind() on a serving thread.
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();
  // Blocks until the server accepts connections.
  void wait_until_ready() const;

 private:
  SessionStore& store_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace cdseg

#endif  // CDSEG_HTTP_SERVICE_H_
