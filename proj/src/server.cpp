// Copyright 2026 The FuzzSplore Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <charconv>

#include <spdlog/spdlog.h>

#include "fuzzsplore/api.hpp"
#include "fuzzsplore/error.hpp"
#include "httplib.h"

namespace fuzzsplore {

namespace {

std::pair<std::string, int> split_bind(const std::string& bind) {
  const auto colon = bind.rfind(':');
  int port = -1;
  if (colon != std::string::npos) {
    const char* b = bind.data() + colon + 1;
    const char* e = bind.data() + bind.size();
    auto [ptr, ec] = std::from_chars(b, e, port);
    if (ec != std::errc() || ptr != e) port = -1;
  }
  if (colon == std::string::npos || colon == 0 || port < 0 || port > 65535)
    throw Error(ErrorKind::ValidationError,
                "bind address must look like host:port, got '" + bind + "'");
  return {bind.substr(0, colon), port};
}

}  // namespace

bool serve(const ApiService& api, const ServeConfig& config) {
  const auto [host, port] = split_bind(config.bind_address);
  httplib::Server svr;

  svr.Get(R"(/api/.*)", [&api](const httplib::Request& req, httplib::Response& res) {
    Query query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);  // first value wins
    const auto r = api.handle(req.path, query);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  });

  if (config.static_dir && !svr.set_mount_point("/", config.static_dir->string()))
    throw Error(ErrorKind::Io, "static dir " + config.static_dir->string() + " is not a directory");

  svr.set_logger([](const httplib::Request& req, const httplib::Response& res) {
    spdlog::debug("{} {} -> {}", req.method, req.path, res.status);
  });

  spdlog::info("serving on http://{}:{}", host, port);
  return svr.listen(host, port);
}

}  // namespace fuzzsplore
