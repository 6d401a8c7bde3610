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

#ifndef SEMINV_TRANSFORM_HPP
#define SEMINV_TRANSFORM_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "seminv/agent.hpp"
#include "seminv/corpus.hpp"

namespace seminv {

class TransformError : public std::runtime_error {
 public:
  explicit TransformError(const std::string& what) : std::runtime_error(what) {}
};

// The eight metamorphic relations. All preserve problem semantics except
// contrastive, which is the negative control.
enum class Relation {
  identity,
  paraphrase,
  reorder_facts,
  expand,
  contract,
  context_academic,
  context_business,
  contrastive,
};

enum class RelationCategory { Structural, Verbosity, Contextual };

enum class TransformMethod { rule, llm };

const std::vector<Relation>& all_relations();

std::string relation_to_string(Relation r);
Relation relation_from_string(const std::string& s);
std::string relation_category_to_string(RelationCategory c);
std::string transform_method_to_string(TransformMethod m);
TransformMethod transform_method_from_string(const std::string& s);

// Fixed mapping: {identity, paraphrase, reorder_facts} -> Structural,
// {expand, contract} -> Verbosity, the rest -> Contextual.
RelationCategory relation_category(Relation r);

// False only for contrastive.
bool semantic_preserving(Relation r);

// Relations with a deterministic rule implementation; reorder_facts has a
// seeded rule fallback next to its LLM path.
bool rule_capable(Relation r);
// Relations handled by LLM-assisted generation.
bool llm_capable(Relation r);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct TransformedProblem {
  std::string problem_id;
  Relation relation = Relation::identity;
  std::string text;
  TransformMethod method = TransformMethod::rule;
  std::optional<std::string> generator_model;
  std::optional<uint64_t> seed;
  std::string original_sha256;  // provenance: hash of the source statement
  std::vector<CheckResult> checks;
  std::vector<std::string> warnings;

  bool checks_passed() const;
};

// Fixed framing templates, shipped with the harness so rule-mode runs are
// offline-reproducible. Both contain the original statement verbatim.
std::string context_academic_template(const std::string& statement);
std::string context_business_template(const std::string& statement);

// Deterministic rule transforms for {identity, context_academic,
// context_business, reorder_facts}. Identity returns the statement
// byte-identical; contextual relations wrap it verbatim in the fixed
// template; reorder applies a seeded sentence permutation. A statement with
// fewer than two sentences cannot be reordered: the result is
// identity-equivalent and carries a warning flag. Throws for relations
// without a rule implementation.
TransformedProblem apply_rule_transform(Relation relation, const Problem& problem, uint64_t seed);

// Per-relation preservation checks (the automatable stand-in for manual
// validation; they catch gross information loss, not semantic drift):
//   identity            byte equality
//   contract            strictly shorter + numeric literals preserved
//   expand              strictly longer + numeric literals preserved
//   reorder_facts       rule: sentence multiset preserved; llm: literals only
//   context_*           original statement contained verbatim (rule)
//   paraphrase          numeric literals of the original preserved
//   contrastive         literals preserved (may add new ones, never drop)
std::vector<CheckResult> check_transform(Relation relation, const std::string& original,
                                         const std::string& transformed,
                                         TransformMethod method = TransformMethod::rule);

// The generation instruction sent to the LLM generator for a relation; states
// the preservation constraint explicitly.
std::string generation_instruction(Relation relation);
// Full generator prompt: instruction + original statement.
std::string generation_prompt(Relation relation, const std::string& statement);

// Thrown when all regeneration attempts produced candidates failing hard
// checks; carries the last candidate and the names of the failed checks.
class GenerationFailure : public TransformError {
 public:
  GenerationFailure(const std::string& what, std::string last_candidate,
                    std::vector<std::string> failed_checks)
      : TransformError(what),
        last_candidate(std::move(last_candidate)),
        failed_checks(std::move(failed_checks)) {}

  std::string last_candidate;
  std::vector<std::string> failed_checks;
};

// LLM-assisted generation for {paraphrase, reorder_facts, expand, contract,
// contrastive}: prompts the generator with the relation's constraint, runs
// check_transform on the candidate, and regenerates up to `max_attempts`
// times before failing hard.
TransformedProblem generate_llm_transform(Relation relation, const Problem& problem,
                                          Agent& generator, int max_attempts = 3);

// Deterministic stand-in for an LLM generator: recognizes the generation
// prompts above and applies simple text rewrites that satisfy the relation's
// checks. Lets transformation pipelines run fully offline.
class MockTransformAgent : public Agent {
 public:
  explicit MockTransformAgent(std::string model_id = "mock-transformer");

  const std::string& model_id() const override { return model_id_; }
  std::string complete(const std::string& prompt) override;

 private:
  std::string model_id_;
};

// Transform cache: keyed by (problem_id, relation) so generation and agent
// evaluation can run as separate phases.
class TransformCache {
 public:
  void put(TransformedProblem variant);
  const TransformedProblem* find(const std::string& problem_id, Relation relation) const;
  size_t size() const { return variants_.size(); }
  const std::map<std::pair<std::string, std::string>, TransformedProblem>& variants() const {
    return variants_;
  }

  static TransformCache load(const std::string& path);
  void save(const std::string& path) const;

 private:
  std::map<std::pair<std::string, std::string>, TransformedProblem> variants_;
};

}  // namespace seminv

#endif  // SEMINV_TRANSFORM_HPP
