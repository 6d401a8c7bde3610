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

#ifndef SEMINV_CORPUS_HPP
#define SEMINV_CORPUS_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace seminv {

enum class Category {
  Physics,
  Mathematics,
  Chemistry,
  Economics,
  Statistics,
  Biology,
  Calculus,
  Optimization,
};

enum class Difficulty { Easy, Medium, Hard };

const std::vector<Category>& all_categories();
const std::vector<Difficulty>& all_difficulties();

std::string category_to_string(Category c);
std::string difficulty_to_string(Difficulty d);
// Case-sensitive; throws CorpusError on unknown names.
Category category_from_string(const std::string& s);
Difficulty difficulty_from_string(const std::string& s);

// A reasoning task with its reference answer and pre-decomposed reference
// steps. Problems are immutable after load and safe to share across workers.
struct Problem {
  std::string id;
  Category category = Category::Physics;
  Difficulty difficulty = Difficulty::Easy;
  std::string statement;
  std::string reference_answer;
  std::vector<std::string> reference_steps;
  std::optional<std::string> notes;

  bool operator==(const Problem&) const = default;
};

struct Corpus {
  std::string schema_version;
  std::vector<Problem> problems;

  bool operator==(const Corpus&) const = default;

  const Problem* find(const std::string& id) const;
};

class CorpusError : public std::runtime_error {
 public:
  explicit CorpusError(const std::string& what) : std::runtime_error(what) {}
};

struct ValidationReport {
  std::vector<std::string> violations;  // hard: schema/emptiness failures
  std::vector<std::string> warnings;    // soft: difficulty step-count bands

  bool ok() const { return violations.empty(); }
};

struct CorpusStats {
  std::map<Category, int> per_category;      // every category present, 0 allowed
  std::map<Difficulty, int> per_difficulty;  // every difficulty present
  int total = 0;
};

// Loads and validates a corpus file (JSON, UTF-8). Throws CorpusError naming
// the offending problem id and field on any hard violation.
Corpus load_corpus(const std::string& path);
Corpus corpus_from_json_text(const std::string& text);

std::string corpus_to_json_text(const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::string& path);

// Pure validator: hard violations plus soft step-count warnings.
// Guidance bands: Easy 2-3 steps, Medium 3-5, Hard 5+.
ValidationReport validate_problem(const Problem& p);

CorpusStats corpus_stats(const Corpus& corpus);

// Single reference text for whole-solution scoring: reference steps joined
// with newlines, followed by the reference answer on its own line.
std::string reference_text(const Problem& p);

}  // namespace seminv

#endif  // SEMINV_CORPUS_HPP
