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

#ifndef SEMINV_SHA256_HPP
#define SEMINV_SHA256_HPP

#include <string>

namespace seminv {

// SHA-256 digest of `data`, lowercase hex. Used for content-addressed cache
// keys and transform provenance hashes.
std::string sha256_hex(const std::string& data);

}  // namespace seminv

#endif  // SEMINV_SHA256_HPP
