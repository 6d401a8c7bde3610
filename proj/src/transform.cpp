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

#include "seminv/transform.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "seminv/sha256.hpp"
#include "seminv/text.hpp"

namespace seminv {

using nlohmann::json;

const std::vector<Relation>& all_relations() {
  static const std::vector<Relation> kAll = {
      Relation::identity,         Relation::paraphrase,      Relation::reorder_facts,
      Relation::expand,           Relation::contract,        Relation::context_academic,
      Relation::context_business, Relation::contrastive};
  return kAll;
}

std::string relation_to_string(Relation r) {
  switch (r) {
    case Relation::identity: return "identity";
    case Relation::paraphrase: return "paraphrase";
    case Relation::reorder_facts: return "reorder_facts";
    case Relation::expand: return "expand";
    case Relation::contract: return "contract";
    case Relation::context_academic: return "context_academic";
    case Relation::context_business: return "context_business";
    case Relation::contrastive: return "contrastive";
  }
  throw TransformError("invalid relation value");
}

Relation relation_from_string(const std::string& s) {
  for (Relation r : all_relations()) {
    if (relation_to_string(r) == s) return r;
  }
  throw TransformError("unknown relation \"" + s + "\"");
}

std::string relation_category_to_string(RelationCategory c) {
  switch (c) {
    case RelationCategory::Structural: return "Structural";
    case RelationCategory::Verbosity: return "Verbosity";
    case RelationCategory::Contextual: return "Contextual";
  }
  throw TransformError("invalid relation category value");
}

std::string transform_method_to_string(TransformMethod m) {
  return m == TransformMethod::rule ? "rule" : "llm";
}

TransformMethod transform_method_from_string(const std::string& s) {
  if (s == "rule") return TransformMethod::rule;
  if (s == "llm") return TransformMethod::llm;
  throw TransformError("unknown transform method \"" + s + "\"");
}

RelationCategory relation_category(Relation r) {
  switch (r) {
    case Relation::identity:
    case Relation::paraphrase:
    case Relation::reorder_facts:
      return RelationCategory::Structural;
    case Relation::expand:
    case Relation::contract:
      return RelationCategory::Verbosity;
    case Relation::context_academic:
    case Relation::context_business:
    case Relation::contrastive:
      return RelationCategory::Contextual;
  }
  throw TransformError("invalid relation value");
}

bool semantic_preserving(Relation r) { return r != Relation::contrastive; }

bool rule_capable(Relation r) {
  return r == Relation::identity || r == Relation::context_academic ||
         r == Relation::context_business || r == Relation::reorder_facts;
}

bool llm_capable(Relation r) {
  return r == Relation::paraphrase || r == Relation::reorder_facts || r == Relation::expand ||
         r == Relation::contract || r == Relation::contrastive;
}

bool TransformedProblem::checks_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

std::string context_academic_template(const std::string& statement) {
  return "The following appeared as an exam question. " + statement +
         " Provide the full worked solution.";
}

std::string context_business_template(const std::string& statement) {
  return "The following came up in a planning review at your company, and the team needs a "
         "reliable resolution. " +
         statement + " Prepare the full worked solution for the team.";
}

namespace {

CheckResult make_check(std::string name, bool passed, std::string detail) {
  return CheckResult{std::move(name), passed, std::move(detail)};
}

CheckResult literal_check(const std::string& original, const std::string& transformed) {
  auto required = numeric_literals(original);
  auto candidate = numeric_literals(transformed);
  bool ok = literal_multiset_contains(candidate, required);
  std::string detail = ok ? "all numeric literals of the original are present"
                          : "numeric literal(s) of the original are missing";
  return make_check("numeric_literals_preserved", ok, std::move(detail));
}

std::multiset<std::string> sentence_multiset(const std::string& text) {
  auto sentences = split_sentences(text);
  return {sentences.begin(), sentences.end()};
}

}  // namespace

std::vector<CheckResult> check_transform(Relation relation, const std::string& original,
                                         const std::string& transformed, TransformMethod method) {
  std::vector<CheckResult> checks;
  checks.push_back(
      make_check("non_empty", !trim(transformed).empty(), "transformed text must be non-empty"));

  switch (relation) {
    case Relation::identity:
      checks.push_back(make_check("byte_identical", transformed == original,
                                  transformed == original ? "texts are byte-identical"
                                                          : "texts differ"));
      break;
    case Relation::contract:
      checks.push_back(make_check(
          "strictly_shorter", transformed.size() < original.size(),
          std::to_string(transformed.size()) + " vs " + std::to_string(original.size()) +
              " chars"));
      checks.push_back(literal_check(original, transformed));
      break;
    case Relation::expand:
      checks.push_back(make_check(
          "strictly_longer", transformed.size() > original.size(),
          std::to_string(transformed.size()) + " vs " + std::to_string(original.size()) +
              " chars"));
      checks.push_back(literal_check(original, transformed));
      break;
    case Relation::reorder_facts:
      if (method == TransformMethod::rule) {
        bool same = sentence_multiset(original) == sentence_multiset(transformed);
        checks.push_back(make_check("sentence_multiset_preserved", same,
                                    same ? "same sentences, possibly permuted"
                                         : "sentence multiset changed"));
      } else {
        checks.push_back(literal_check(original, transformed));
      }
      break;
    case Relation::context_academic:
    case Relation::context_business: {
      bool contains = transformed.find(original) != std::string::npos;
      checks.push_back(make_check("contains_original_verbatim", contains,
                                  contains ? "original statement embedded verbatim"
                                           : "original statement not found verbatim"));
      break;
    }
    case Relation::paraphrase:
    case Relation::contrastive:
      // Contrastive may add literals in its contrast passage, never drop any.
      checks.push_back(literal_check(original, transformed));
      break;
  }
  return checks;
}

TransformedProblem apply_rule_transform(Relation relation, const Problem& problem,
                                        uint64_t seed) {
  if (!rule_capable(relation)) {
    throw TransformError("relation \"" + relation_to_string(relation) +
                         "\" has no rule implementation");
  }

  TransformedProblem out;
  out.problem_id = problem.id;
  out.relation = relation;
  out.method = TransformMethod::rule;
  out.seed = seed;
  out.original_sha256 = sha256_hex(problem.statement);

  switch (relation) {
    case Relation::identity:
      out.text = problem.statement;
      break;
    case Relation::context_academic:
      out.text = context_academic_template(problem.statement);
      break;
    case Relation::context_business:
      out.text = context_business_template(problem.statement);
      break;
    case Relation::reorder_facts: {
      std::vector<std::string> sentences = split_sentences(problem.statement);
      if (sentences.size() < 2) {
        out.text = problem.statement;
        out.warnings.push_back("statement has fewer than 2 sentences; reorder returned the "
                               "original text");
      } else {
        std::mt19937_64 rng(seed);
        std::shuffle(sentences.begin(), sentences.end(), rng);
        out.text = join_sentences(sentences);
      }
      break;
    }
    default:
      throw TransformError("unreachable");
  }

  out.checks = check_transform(relation, problem.statement, out.text, TransformMethod::rule);
  return out;
}

std::string generation_instruction(Relation relation) {
  switch (relation) {
    case Relation::paraphrase:
      return "Rewrite the problem below using different wording and sentence structure while "
             "preserving its meaning exactly. Keep every fact, quantity, and constraint; do "
             "not add or remove information.";
    case Relation::reorder_facts:
      return "Rewrite the problem below so that its independent facts are presented in a "
             "different order. Do not change, add, or remove any fact or quantity.";
    case Relation::expand:
      return "Rewrite the problem below adding clarifying context, definitions, or "
             "elaborations that provide no new information needed for the solution. Keep every "
             "original fact and number; the result must be longer than the original.";
    case Relation::contract:
      return "Rewrite the problem below removing redundant or non-essential linguistic "
             "material while keeping all information necessary for the solution. Keep every "
             "number; the result must be shorter than the original.";
    case Relation::contrastive:
      return "Restate the problem below, then append an explicit contrast with an alternative "
             "scenario or common misconception. The original question must remain answerable "
             "and unchanged in content.";
    default:
      throw TransformError("relation \"" + relation_to_string(relation) +
                           "\" has no generation instruction");
  }
}

std::string generation_prompt(Relation relation, const std::string& statement) {
  return generation_instruction(relation) + "\n\nOriginal problem:\n" + statement +
         "\n\nRespond with only the rewritten problem text.";
}

TransformedProblem generate_llm_transform(Relation relation, const Problem& problem,
                                          Agent& generator, int max_attempts) {
  if (!llm_capable(relation)) {
    throw TransformError("relation \"" + relation_to_string(relation) +
                         "\" is not handled by LLM-assisted generation");
  }
  if (max_attempts < 1) throw TransformError("generate_llm_transform: max_attempts must be >= 1");

  const std::string prompt = generation_prompt(relation, problem.statement);

  std::string last_candidate;
  std::vector<CheckResult> last_checks;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    std::string candidate = trim(generator.complete(prompt));
    std::vector<CheckResult> checks =
        check_transform(relation, problem.statement, candidate, TransformMethod::llm);
    bool ok = std::all_of(checks.begin(), checks.end(),
                          [](const CheckResult& c) { return c.passed; });
    if (ok) {
      TransformedProblem out;
      out.problem_id = problem.id;
      out.relation = relation;
      out.text = std::move(candidate);
      out.method = TransformMethod::llm;
      out.generator_model = generator.model_id();
      out.original_sha256 = sha256_hex(problem.statement);
      out.checks = std::move(checks);
      return out;
    }
    last_candidate = std::move(candidate);
    last_checks = std::move(checks);
  }

  std::vector<std::string> failed;
  std::string failed_names;
  for (const CheckResult& c : last_checks) {
    if (c.passed) continue;
    failed.push_back(c.name);
    if (!failed_names.empty()) failed_names += ", ";
    failed_names += c.name;
  }
  throw GenerationFailure("generation for relation \"" + relation_to_string(relation) +
                              "\" on problem \"" + problem.id + "\" failed checks [" +
                              failed_names + "] after " + std::to_string(max_attempts) +
                              " attempts",
                          last_candidate, failed);
}

MockTransformAgent::MockTransformAgent(std::string model_id) : model_id_(std::move(model_id)) {}

namespace {

// Removes one filler word ("the"/"a"/"an", any case) to make the text
// strictly shorter without touching any numeric literal.
bool remove_one_filler_word(std::string& text) {
  const std::string lower = to_lower(text);
  for (const std::string& word : {std::string("the"), std::string("an"), std::string("a")}) {
    size_t pos = 0;
    while ((pos = lower.find(word, pos)) != std::string::npos) {
      bool start_ok = pos == 0 || lower[pos - 1] == ' ';
      size_t end = pos + word.size();
      bool end_ok = end < lower.size() && lower[end] == ' ';
      if (start_ok && end_ok) {
        text.erase(pos, word.size() + 1);  // word plus one following space
        return true;
      }
      pos += 1;
    }
  }
  return false;
}

}  // namespace

std::string MockTransformAgent::complete(const std::string& prompt) {
  const std::string original_marker = "\n\nOriginal problem:\n";
  const std::string tail_marker = "\n\nRespond with only the rewritten problem text.";
  size_t begin = prompt.find(original_marker);
  size_t end = prompt.rfind(tail_marker);
  if (begin == std::string::npos || end == std::string::npos || end <= begin) {
    throw AgentError("MockTransformAgent: unrecognized prompt shape");
  }
  begin += original_marker.size();
  const std::string statement = prompt.substr(begin, end - begin);

  Relation relation = Relation::identity;
  bool found = false;
  for (Relation r : all_relations()) {
    if (!llm_capable(r)) continue;
    if (prompt.rfind(generation_instruction(r), 0) == 0) {
      relation = r;
      found = true;
      break;
    }
  }
  if (!found) throw AgentError("MockTransformAgent: unknown generation instruction");

  switch (relation) {
    case Relation::paraphrase:
      return "Put differently: " + statement;
    case Relation::reorder_facts: {
      std::vector<std::string> sentences = split_sentences(statement);
      std::reverse(sentences.begin(), sentences.end());
      return join_sentences(sentences);
    }
    case Relation::expand:
      return statement +
             " For clarity: use the quantities exactly as given, and recall any standard "
             "definitions involved before solving.";
    case Relation::contract: {
      std::string shorter = statement;
      if (!remove_one_filler_word(shorter)) {
        // No safe word to drop; return unchanged and let the checks reject it.
        return statement;
      }
      return shorter;
    }
    case Relation::contrastive:
      return statement +
             " In contrast, imagine a variant of this scenario where the given quantities "
             "were different; ignore that variant and answer the stated problem only.";
    default:
      throw AgentError("MockTransformAgent: unreachable");
  }
}

namespace {

json check_to_json(const CheckResult& c) {
  return json{{"name", c.name}, {"pass", c.passed}, {"detail", c.detail}};
}

CheckResult check_from_json(const json& obj) {
  CheckResult c;
  c.name = obj.value("name", "");
  c.passed = obj.value("pass", false);
  c.detail = obj.value("detail", "");
  return c;
}

json variant_to_json(const TransformedProblem& v) {
  json obj;
  obj["problem_id"] = v.problem_id;
  obj["relation"] = relation_to_string(v.relation);
  obj["text"] = v.text;
  obj["method"] = transform_method_to_string(v.method);
  if (v.generator_model) obj["generator_model"] = *v.generator_model;
  if (v.seed) obj["seed"] = *v.seed;
  obj["original_sha256"] = v.original_sha256;
  json checks = json::array();
  for (const CheckResult& c : v.checks) checks.push_back(check_to_json(c));
  obj["checks"] = checks;
  if (!v.warnings.empty()) obj["warnings"] = v.warnings;
  return obj;
}

TransformedProblem variant_from_json(const json& obj) {
  TransformedProblem v;
  v.problem_id = obj.at("problem_id").get<std::string>();
  v.relation = relation_from_string(obj.at("relation").get<std::string>());
  v.text = obj.at("text").get<std::string>();
  v.method = transform_method_from_string(obj.at("method").get<std::string>());
  if (obj.contains("generator_model")) v.generator_model = obj["generator_model"].get<std::string>();
  if (obj.contains("seed")) v.seed = obj["seed"].get<uint64_t>();
  v.original_sha256 = obj.value("original_sha256", "");
  if (obj.contains("checks")) {
    for (const json& c : obj["checks"]) v.checks.push_back(check_from_json(c));
  }
  if (obj.contains("warnings")) v.warnings = obj["warnings"].get<std::vector<std::string>>();
  return v;
}

}  // namespace

void TransformCache::put(TransformedProblem variant) {
  auto key = std::make_pair(variant.problem_id, relation_to_string(variant.relation));
  variants_[key] = std::move(variant);
}

const TransformedProblem* TransformCache::find(const std::string& problem_id,
                                               Relation relation) const {
  auto it = variants_.find(std::make_pair(problem_id, relation_to_string(relation)));
  return it == variants_.end() ? nullptr : &it->second;
}

TransformCache TransformCache::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TransformError("cannot open transform cache \"" + path + "\"");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw TransformError(std::string("malformed transform cache: ") + e.what());
  }
  TransformCache cache;
  if (!doc.contains("variants") || !doc["variants"].is_array()) {
    throw TransformError("transform cache missing \"variants\" array");
  }
  for (const json& obj : doc["variants"]) {
    try {
      cache.put(variant_from_json(obj));
    } catch (const json::exception& e) {
      throw TransformError(std::string("malformed transform cache entry: ") + e.what());
    }
  }
  return cache;
}

void TransformCache::save(const std::string& path) const {
  json variants = json::array();
  for (const auto& [key, variant] : variants_) variants.push_back(variant_to_json(variant));
  json doc;
  doc["schema_version"] = "1";
  doc["variants"] = variants;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TransformError("cannot open transform cache \"" + path + "\" for writing");
  out << doc.dump(2) << "\n";
}

}  // namespace seminv
