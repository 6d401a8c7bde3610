// Copyright 2026 The seminv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "seminv/http_util.hpp"

#include <stdexcept>

#include <httplib.h>

namespace seminv {

namespace {

struct ParsedUrl {
  std::string base;  // scheme://host[:port]
  std::string path;  // leading slash
};

ParsedUrl parse_url(const std::string& url) {
  size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw std::invalid_argument("invalid URL (missing scheme): " + url);
  }
  size_t path_start = url.find('/', scheme_end + 3);
  ParsedUrl out;
  if (path_start == std::string::npos) {
    out.base = url;
    out.path = "/";
  } else {
    out.base = url.substr(0, path_start);
    out.path = url.substr(path_start);
  }
  return out;
}

}  // namespace

HttpResult http_post_json(const std::string& url, const std::string& body,
                          const std::string& api_key, int timeout_s) {
  ParsedUrl parsed = parse_url(url);
  httplib::Client client(parsed.base);
  client.set_connection_timeout(timeout_s, 0);
  client.set_read_timeout(timeout_s, 0);
  client.set_write_timeout(timeout_s, 0);

  httplib::Headers headers;
  if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

  HttpResult out;
  httplib::Result res = client.Post(parsed.path, headers, body, "application/json");
  if (!res) {
    out.transport_ok = false;
    out.error = httplib::to_string(res.error());
    return out;
  }
  out.transport_ok = true;
  out.status = res->status;
  out.body = res->body;
  return out;
}

}  // namespace seminv
