#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "deonnet/expected.hpp"
#include "deonnet/prop.hpp"

namespace deonnet::ansio {

/// Element of an abstract universe: top, a base element, or its
/// anti-element.
struct AnsElem {
  enum class Kind { Top, Pos, Neg };
  Kind kind = Kind::Top;
  std::string base;

  static AnsElem top() { return {Kind::Top, ""}; }
  static AnsElem pos(std::string b) { return {Kind::Pos, std::move(b)}; }
  static AnsElem neg(std::string b) { return {Kind::Neg, std::move(b)}; }

  auto operator<=>(const AnsElem&) const = default;
  std::string to_string() const;
};

struct Universe {
  std::set<std::string> elements;

  bool contains(const AnsElem& e) const {
    return e.kind == AnsElem::Kind::Top || elements.count(e.base) != 0;
  }
};

Expected<AnsElem> anti(const Universe& u, const AnsElem& a);

struct ANSystem {
  Universe universe;
  std::set<std::pair<AnsElem, AnsElem>> norms;
};

/// A context always contains top.
struct Context {
  std::set<AnsElem> elems;

  Context() { elems.insert(AnsElem::top()); }
  explicit Context(std::set<AnsElem> es) : elems(std::move(es)) {
    elems.insert(AnsElem::top());
  }
};

/// The deontic operations over abstract normative systems. `variant` selects
/// simple-minded (1), basic (2), reusable (3) or basic-reusable (4) output;
/// `throughput` adds the identity pair for every element of the universe.
Expected<std::set<AnsElem>> ans_output(const ANSystem& sys, const Context& a,
                                       int variant, bool throughput);

/// Context elements whose anti-element is in the output.
Expected<std::set<AnsElem>> violations(const ANSystem& sys, const Context& a,
                                       int variant, bool throughput);

/// Truth-table entailment over the combined vocabulary (<= 16 atoms).
Expected<bool> entails(const std::vector<prop::Formula>& assumptions,
                       const prop::Formula& phi);

struct IOGeneratorSet {
  std::vector<std::pair<prop::Formula, prop::Formula>> gens;

  std::vector<std::string> vocab() const;
};

/// Membership of phi in out_variant(N, A). Output sets are infinite, so only
/// the membership test is exposed.
Expected<bool> io_member(const IOGeneratorSet& gens,
                         const std::vector<prop::Formula>& a,
                         const prop::Formula& phi, int variant);

/// io_member with supporting detail for the CLI: the detached heads that
/// witnessed a positive answer, or a falsifying valuation if one exists.
struct IoQueryReport {
  bool member = false;
  std::vector<std::string> detached_heads;
  std::optional<std::map<std::string, bool>> countervaluation;
};
Expected<IoQueryReport> io_query(const IOGeneratorSet& gens,
                                 const std::vector<prop::Formula>& a,
                                 const prop::Formula& phi, int variant);

// CLI-facing parsing: norms as `(body, head); (body, head)`, contexts as
// comma-separated elements with `-x` for the anti-element of x.
Expected<AnsElem> parse_ans_elem(std::string_view text);
std::string print_elem_set(const std::set<AnsElem>& es);

}  // namespace deonnet::ansio
