#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "deonnet/expected.hpp"

namespace deonnet::logic {

struct Atom {
  std::string name;
  auto operator<=>(const Atom&) const = default;
};

/// A classical literal: an atom or its classical (explicit) negation.
struct Literal {
  Atom atom;
  bool negated = false;

  Literal complement() const { return Literal{atom, !negated}; }
  auto operator<=>(const Literal&) const = default;
};

/// A body occurrence of a literal, optionally under default negation.
struct BodyLiteral {
  Literal lit;
  bool naf = false;
  auto operator<=>(const BodyLiteral&) const = default;
};

struct Clause {
  std::optional<std::string> label;
  Literal head;
  std::vector<BodyLiteral> body;

  bool is_fact() const { return body.empty(); }
};

struct ExtendedProgram {
  std::vector<Clause> clauses;

  /// All atoms mentioned anywhere in the clauses.
  std::set<Atom> vocabulary() const;
};

enum class Truth3 : int { False = -1, Unknown = 0, True = 1 };

inline int truth_to_int(Truth3 t) { return static_cast<int>(t); }
Truth3 truth_from_int(int v);

/// Total three-valued assignment over a declared vocabulary. Atoms outside
/// the vocabulary are rejected.
class Interpretation3 {
 public:
  Interpretation3() = default;
  explicit Interpretation3(const std::set<Atom>& vocabulary,
                           Truth3 init = Truth3::Unknown);

  bool has(const Atom& a) const { return values_.count(a) != 0; }
  Truth3 at(const Atom& a) const;
  std::optional<Truth3> find(const Atom& a) const;
  void set(const Atom& a, Truth3 v);

  const std::map<Atom, Truth3>& values() const { return values_; }
  bool operator==(const Interpretation3&) const = default;

 private:
  std::map<Atom, Truth3> values_;
};

struct LiteralSet {
  std::set<Literal> members;

  bool contains(const Literal& l) const { return members.count(l) != 0; }
  void insert(const Literal& l) { members.insert(l); }
  bool consistent() const;
  bool subset_of(const LiteralSet& other) const;
  bool operator==(const LiteralSet&) const = default;
};

/// One application of the immediate consequence operator.
LiteralSet tp_step(const ExtendedProgram& p, const LiteralSet& current);

/// Partition the clauses into strata such that default-negated dependencies
/// point strictly downward and positive dependencies same-or-downward.
Expected<std::vector<std::vector<Clause>>> stratify(const ExtendedProgram& p);

/// Unique answer set of a stratifiable program, computed by iterating
/// tp_step to a fixpoint stratum by stratum.
Expected<LiteralSet> answer_set(const ExtendedProgram& p);

/// All answer sets by enumerating candidate literal sets and checking each
/// against the least model of its reduct. Test oracle; vocabulary <= 16.
Expected<std::vector<LiteralSet>> brute_force_answer_sets(
    const ExtendedProgram& p);

// Text format, one clause per line: `head <- l1, l2, not l3.` with `-a` for
// classical negation and bare `head.` for facts. `%` starts a comment.
ExtendedProgram parse_program(std::string_view text);
std::string print_program(const ExtendedProgram& p);
std::string print_literal(const Literal& l);
std::string print_clause(const Clause& c);
std::string print_literal_set(const LiteralSet& s);

}  // namespace deonnet::logic
