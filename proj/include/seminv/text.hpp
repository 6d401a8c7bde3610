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

#ifndef SEMINV_TEXT_HPP
#define SEMINV_TEXT_HPP

#include <map>
#include <string>
#include <vector>

namespace seminv {

// Shared text helpers used by the transform, embed, and agent modules.

std::string trim(const std::string& s);
std::string to_lower(std::string s);

// Splits into lowercase alphanumeric tokens (everything else is a separator).
std::vector<std::string> tokenize(const std::string& text);

// Sentence segmentation: a sentence ends at '.', '?' or '!' when followed by
// whitespace or end of text. The delimiter stays with its sentence; the
// returned sentences are trimmed. "9.8" does not split (no whitespace after
// the dot).
std::vector<std::string> split_sentences(const std::string& text);

// Joins sentences back into a single statement with one space between them.
std::string join_sentences(const std::vector<std::string>& sentences);

// Numeric literals as parsed values: maximal runs matching digits with an
// optional single fractional part ("9.8", "45", "1024"). Returned as a
// value -> count multiset.
std::map<double, int> numeric_literals(const std::string& text);

// True when every literal of `required` appears in `candidate` with at least
// the same multiplicity.
bool literal_multiset_contains(const std::map<double, int>& candidate,
                               const std::map<double, int>& required);

}  // namespace seminv

#endif  // SEMINV_TEXT_HPP
