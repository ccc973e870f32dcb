#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "deonnet/expected.hpp"
#include "deonnet/logic.hpp"

namespace deonnet::kleene {

using logic::Atom;
using logic::Interpretation3;
using logic::Truth3;
using logic::truth_from_int;
using logic::truth_to_int;

/// Immutable propositional formula over atoms with strong Kleene semantics.
class KFormula {
 public:
  enum class Kind { Top, Bot, Atom, Not, And, Or, Iff };

  static KFormula top();
  static KFormula bot();
  static KFormula atom(Atom a);
  static KFormula lnot(KFormula f);
  static KFormula land(KFormula l, KFormula r);
  static KFormula lor(KFormula l, KFormula r);
  static KFormula iff(KFormula l, KFormula r);

  Kind kind() const { return node_->kind; }
  const Atom& atom_name() const { return node_->atom; }
  KFormula left() const { return KFormula(node_->left); }
  KFormula right() const { return KFormula(node_->right); }

  void collect_atoms(std::set<Atom>& out) const;
  std::string to_string() const;

 private:
  struct Node {
    Kind kind;
    Atom atom;
    std::shared_ptr<const Node> left, right;
  };
  explicit KFormula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
  static KFormula wrap(const std::shared_ptr<const Node>& n) {
    return KFormula(n);
  }
};

/// Body element of a clause: a literal, verum or falsum.
struct KBodyLit {
  enum class Kind { Lit, Verum, Falsum };
  Kind kind = Kind::Lit;
  Atom atom;
  bool negated = false;

  auto operator<=>(const KBodyLit&) const = default;
};

/// head <- conjunction of body elements; an empty body reads as verum.
struct KClause {
  Atom head;
  std::vector<KBodyLit> body;
};

struct KProgram {
  std::vector<KClause> clauses;
  std::set<Atom> declared;  // extra vocabulary closed off by completion

  std::set<Atom> vocabulary() const;
  KProgram with_facts(const std::set<Atom>& facts) const;
};

Expected<Truth3> kleene_eval(const KFormula& f, const Interpretation3& i);

struct CompletedTheory {
  // Defining disjunction per atom; atoms without clauses map to falsum.
  std::map<Atom, KFormula> biconditionals;
};

CompletedTheory complete(const KProgram& p);

/// Least fixpoint of the three-valued consequence step, starting all-unknown
/// with the given facts true. Atoms in `unknown_facts` are exempt from the
/// closed-world step: they stay indeterminate unless some clause decides them.
Interpretation3 minimal_model(const KProgram& p, const std::set<Atom>& facts,
                              const std::set<Atom>& unknown_facts = {});

enum class QueryResult { Succeeds, Fails, DepthExceeded };

struct TraceStep {
  enum class Kind { Query, Reduce, ClauseFails, NafSucceeds, NafFails,
                    NoClauses, Succeeds, Fails, DepthExceeded };
  Kind kind;
  int depth;
  Atom goal;
  int clause_index = -1;
  std::vector<KBodyLit> subgoals;

  std::string render() const;
};

struct QueryOutcome {
  QueryResult result;
  std::vector<TraceStep> trace;

  /// True when some step reduces `goal` to a clause body mentioning `sub`.
  bool reduced_to(const Atom& goal, const Atom& sub) const;
};

/// Backward chaining with negation as finite failure.
QueryOutcome sldnf_query(const KProgram& p, const Atom& goal,
                         int depth_limit = 10000);

// Clause syntax as in logic-core minus `not`; `-` is classical negation and
// `top`/`bot` are the constants.
KProgram parse_kprogram(std::string_view text);
std::string print_kprogram(const KProgram& p);

}  // namespace deonnet::kleene
