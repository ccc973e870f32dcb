#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "deonnet/expected.hpp"
#include "deonnet/logic.hpp"
#include "deonnet/prop.hpp"

namespace deonnet::norms {

using logic::Atom;
using logic::Clause;
using logic::ExtendedProgram;
using logic::Literal;

/// Disjunctive normal form: each disjunct is a conjunction of literals.
/// An empty disjunct reads as verum; no disjuncts reads as falsum.
struct Dnf {
  std::vector<std::vector<Literal>> disjuncts;
};

/// Distribute conjunction over disjunction. The input must be in negation
/// normal form (negation only on atoms, no implication).
Expected<Dnf> to_dnf(const prop::Formula& f);

struct ObligationRule {
  std::string label;
  Dnf body;
  std::vector<Literal> head;  // conjunction, non-empty
};

struct PermissionRule {
  std::string label;
  Dnf body;
  Literal head;
};

struct NormativeCode {
  std::vector<ObligationRule> obligations;
  std::vector<PermissionRule> permissions;
  // (higher, lower) label pairs
  std::vector<std::pair<std::string, std::string>> priorities;

  const ObligationRule* find_obligation(const std::string& label) const;
  const PermissionRule* find_permission(const std::string& label) const;
};

/// Namespace mapping: rule bodies live on the input side, heads on the
/// output side, so the compiled program never identifies the two.
Atom input_atom(const std::string& name);
Atom output_atom(const std::string& name);
bool is_input_atom(const Atom& a);
bool is_output_atom(const Atom& a);
std::string strip_namespace(const Atom& a);

struct RuleInstance {
  std::string parent_label;
  int disjunct_index = 1;  // 1-based
  int conjunct_index = 1;
  Clause clause;           // body over in_*, head over out_*

  std::string instance_label() const;
};

struct Instantiation {
  std::vector<RuleInstance> instances;
  // lifted obligation priorities, as (higher instance idx, lower instance idx)
  std::vector<std::pair<std::size_t, std::size_t>> lifted;
};

/// Split every obligation into its per-disjunct, per-conjunct instances and
/// lift the declared obligation priorities onto them.
Instantiation instantiate(const NormativeCode& code);

/// Priorities induced by permissions: a permission outranks every obligation
/// instance whose head is the complement of the permitted literal.
/// Pairs are (permission index, instance index).
std::vector<std::pair<std::size_t, std::size_t>> permission_priorities(
    const Instantiation& inst, const std::vector<PermissionRule>& permissions);

struct CompileOptions {
  // (higher label, lower label) pairs to leave unencoded, applied to both the
  // declared priorities and the permission-induced ones.
  std::set<std::pair<std::string, std::string>> exclude_priorities;
};

/// Rewrite the priority relation into default negation: each instance's body
/// gains `not L` for every body literal L of a higher-priority rule that it
/// does not itself contain. Permissions contribute guards but no clauses.
Expected<ExtendedProgram> encode_priorities(
    const Instantiation& inst, const NormativeCode& code,
    const std::vector<std::pair<std::size_t, std::size_t>>& perm_pairs);

Expected<void*> validate(const NormativeCode& code);

/// Full pipeline: instantiate, add permission priorities, encode into an
/// extended logic program. The result is stratified by construction.
Expected<ExtendedProgram> compile(const NormativeCode& code,
                                  const CompileOptions& opts = {});

// DSL, one statement per line:
//   rule R1: (a & b | c, O(-d & e)).
//   perm R3: (g, P(-f)).
//   prio R1 > R2.
Expected<NormativeCode> parse_code(std::string_view text);

/// Paper-style display: namespaces stripped (bodies are input atoms, heads
/// output atoms, so the bare form is unambiguous).
std::string display_program(const ExtendedProgram& p);
std::string display_clause(const Clause& c);

}  // namespace deonnet::norms
