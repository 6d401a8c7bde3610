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

#include "seminv/corpus.hpp"

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "seminv/text.hpp"

namespace seminv {

using nlohmann::json;

const std::vector<Category>& all_categories() {
  static const std::vector<Category> kAll = {
      Category::Physics,    Category::Mathematics, Category::Chemistry,
      Category::Economics,  Category::Statistics,  Category::Biology,
      Category::Calculus,   Category::Optimization};
  return kAll;
}

const std::vector<Difficulty>& all_difficulties() {
  static const std::vector<Difficulty> kAll = {Difficulty::Easy, Difficulty::Medium,
                                               Difficulty::Hard};
  return kAll;
}

std::string category_to_string(Category c) {
  switch (c) {
    case Category::Physics: return "Physics";
    case Category::Mathematics: return "Mathematics";
    case Category::Chemistry: return "Chemistry";
    case Category::Economics: return "Economics";
    case Category::Statistics: return "Statistics";
    case Category::Biology: return "Biology";
    case Category::Calculus: return "Calculus";
    case Category::Optimization: return "Optimization";
  }
  throw CorpusError("invalid category value");
}

std::string difficulty_to_string(Difficulty d) {
  switch (d) {
    case Difficulty::Easy: return "Easy";
    case Difficulty::Medium: return "Medium";
    case Difficulty::Hard: return "Hard";
  }
  throw CorpusError("invalid difficulty value");
}

Category category_from_string(const std::string& s) {
  for (Category c : all_categories()) {
    if (category_to_string(c) == s) return c;
  }
  throw CorpusError("unknown category \"" + s + "\"");
}

Difficulty difficulty_from_string(const std::string& s) {
  for (Difficulty d : all_difficulties()) {
    if (difficulty_to_string(d) == s) return d;
  }
  throw CorpusError("unknown difficulty \"" + s + "\"");
}

const Problem* Corpus::find(const std::string& id) const {
  for (const Problem& p : problems) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

namespace {

std::string require_string(const json& obj, const char* field, const std::string& context) {
  if (!obj.contains(field) || !obj[field].is_string()) {
    throw CorpusError(context + ": missing or non-string field \"" + field + "\"");
  }
  return obj[field].get<std::string>();
}

Problem problem_from_json(const json& obj, size_t index) {
  std::string context = "problem #" + std::to_string(index);
  Problem p;
  p.id = require_string(obj, "id", context);
  context = "problem \"" + p.id + "\"";
  p.category = category_from_string(require_string(obj, "category", context));
  p.difficulty = difficulty_from_string(require_string(obj, "difficulty", context));
  p.statement = require_string(obj, "statement", context);
  p.reference_answer = require_string(obj, "reference_answer", context);
  if (!obj.contains("reference_steps") || !obj["reference_steps"].is_array()) {
    throw CorpusError(context + ": missing or non-array field \"reference_steps\"");
  }
  for (const json& step : obj["reference_steps"]) {
    if (!step.is_string()) {
      throw CorpusError(context + ": non-string entry in \"reference_steps\"");
    }
    p.reference_steps.push_back(step.get<std::string>());
  }
  if (obj.contains("notes") && !obj["notes"].is_null()) {
    if (!obj["notes"].is_string()) {
      throw CorpusError(context + ": non-string field \"notes\"");
    }
    p.notes = obj["notes"].get<std::string>();
  }
  return p;
}

json problem_to_json(const Problem& p) {
  json obj;
  obj["id"] = p.id;
  obj["category"] = category_to_string(p.category);
  obj["difficulty"] = difficulty_to_string(p.difficulty);
  obj["statement"] = p.statement;
  obj["reference_answer"] = p.reference_answer;
  obj["reference_steps"] = p.reference_steps;
  if (p.notes) obj["notes"] = *p.notes;
  return obj;
}

}  // namespace

Corpus corpus_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw CorpusError(std::string("malformed corpus document: ") + e.what());
  }
  if (!doc.is_object()) throw CorpusError("malformed corpus document: top level is not an object");

  Corpus corpus;
  if (!doc.contains("schema_version") || !doc["schema_version"].is_string()) {
    throw CorpusError("corpus: missing or non-string field \"schema_version\"");
  }
  corpus.schema_version = doc["schema_version"].get<std::string>();
  if (!doc.contains("problems") || !doc["problems"].is_array()) {
    throw CorpusError("corpus: missing or non-array field \"problems\"");
  }
  size_t index = 0;
  for (const json& obj : doc["problems"]) {
    if (!obj.is_object()) throw CorpusError("problem #" + std::to_string(index) + ": not an object");
    corpus.problems.push_back(problem_from_json(obj, index));
    ++index;
  }
  if (corpus.problems.empty()) throw CorpusError("empty corpus");

  std::set<std::string> seen;
  for (const Problem& p : corpus.problems) {
    if (!seen.insert(p.id).second) {
      throw CorpusError("duplicate problem id \"" + p.id + "\"");
    }
    ValidationReport report = validate_problem(p);
    if (!report.ok()) throw CorpusError(report.violations.front());
  }
  return corpus;
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open corpus file \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return corpus_from_json_text(buf.str());
}

std::string corpus_to_json_text(const Corpus& corpus) {
  json doc;
  doc["schema_version"] = corpus.schema_version;
  json problems = json::array();
  for (const Problem& p : corpus.problems) problems.push_back(problem_to_json(p));
  doc["problems"] = problems;
  return doc.dump(2) + "\n";
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorpusError("cannot open \"" + path + "\" for writing");
  out << corpus_to_json_text(corpus);
}

ValidationReport validate_problem(const Problem& p) {
  ValidationReport report;
  const std::string who = "problem \"" + p.id + "\"";
  if (p.id.empty()) report.violations.push_back("problem with empty id");
  if (trim(p.statement).empty()) report.violations.push_back(who + ": empty statement");
  if (trim(p.reference_answer).empty()) {
    report.violations.push_back(who + ": empty reference_answer");
  }
  if (p.reference_steps.empty()) {
    report.violations.push_back(who + ": reference_steps must have at least one step");
  }
  for (size_t i = 0; i < p.reference_steps.size(); ++i) {
    if (trim(p.reference_steps[i]).empty()) {
      report.violations.push_back(who + ": empty reference step #" + std::to_string(i + 1));
    }
  }

  // Step-count guidance is descriptive, not a schema constraint.
  size_t k = p.reference_steps.size();
  size_t lo = 0, hi = SIZE_MAX;
  switch (p.difficulty) {
    case Difficulty::Easy: lo = 2; hi = 3; break;
    case Difficulty::Medium: lo = 3; hi = 5; break;
    case Difficulty::Hard: lo = 5; hi = SIZE_MAX; break;
  }
  if (k > 0 && k < lo) {
    report.warnings.push_back(who + ": step count below difficulty guidance (" +
                              std::to_string(k) + " < " + std::to_string(lo) + " for " +
                              difficulty_to_string(p.difficulty) + ")");
  } else if (k > hi) {
    report.warnings.push_back(who + ": step count above difficulty guidance (" +
                              std::to_string(k) + " > " + std::to_string(hi) + " for " +
                              difficulty_to_string(p.difficulty) + ")");
  }
  return report;
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  for (Category c : all_categories()) stats.per_category[c] = 0;
  for (Difficulty d : all_difficulties()) stats.per_difficulty[d] = 0;
  for (const Problem& p : corpus.problems) {
    stats.per_category[p.category] += 1;
    stats.per_difficulty[p.difficulty] += 1;
    stats.total += 1;
  }
  return stats;
}

std::string reference_text(const Problem& p) {
  std::string out;
  for (const std::string& step : p.reference_steps) {
    out += step;
    out.push_back('\n');
  }
  out += p.reference_answer;
  return out;
}

}  // namespace seminv
