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

#ifndef SEMINV_HTTP_UTIL_HPP
#define SEMINV_HTTP_UTIL_HPP

#include <string>

namespace seminv {

struct HttpResult {
  bool transport_ok = false;  // false: connection/timeout failure, see error
  int status = 0;
  std::string body;
  std::string error;
};

// POST a JSON body to a full URL ("scheme://host[:port]/path"). Sends
// "Authorization: Bearer <api_key>" when api_key is non-empty. The key is
// never logged or persisted.
HttpResult http_post_json(const std::string& url, const std::string& body,
                          const std::string& api_key, int timeout_s);

}  // namespace seminv

#endif  // SEMINV_HTTP_UTIL_HPP
