#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "deonnet/expected.hpp"

namespace deonnet::prop {

/// Immutable propositional formula over named atoms.
class Formula {
 public:
  enum class Kind { Top, Atom, Not, And, Or, Implies };

  static Formula top();
  static Formula atom(std::string name);
  static Formula lnot(Formula f);
  static Formula land(Formula l, Formula r);
  static Formula lor(Formula l, Formula r);
  static Formula implies(Formula l, Formula r);

  Kind kind() const { return node_->kind; }
  const std::string& atom_name() const { return node_->atom; }
  Formula left() const { return Formula(node_->left); }
  Formula right() const { return Formula(node_->right); }

  void collect_atoms(std::set<std::string>& out) const;
  bool eval(const std::map<std::string, bool>& valuation) const;
  std::string to_string() const;

 private:
  struct Node {
    Kind kind;
    std::string atom;
    std::shared_ptr<const Node> left, right;
  };
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Sorted vocabulary of a formula collection.
std::vector<std::string> vocabulary(const std::vector<Formula>& fs);

// Text syntax: `&`, `|`, `-`, `->`, `top`, parentheses. `-` binds tightest,
// then `&`, then `|`; `->` is right-associative and binds loosest.
Formula parse_formula(std::string_view text);

}  // namespace deonnet::prop
