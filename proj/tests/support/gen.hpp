#pragma once

// Random-instance generators shared by the property tests.

#include <string>
#include <vector>

#include "deonnet/logic.hpp"
#include "deonnet/rng.hpp"

namespace testgen {

using deonnet::Rng;
using namespace deonnet::logic;

inline std::vector<Atom> atom_pool(std::size_t n) {
  std::vector<Atom> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(Atom{std::string(1, static_cast<char>('a' + i))});
  return out;
}

struct ProgramOptions {
  std::size_t max_atoms = 8;
  std::size_t max_clauses = 12;
  std::size_t max_body = 3;
  // strict: every body literal ranks strictly below the head (acyclic);
  // otherwise positive body literals may rank equal (stratified).
  bool strict_acyclic = false;
  bool allow_negated_heads = true;
};

// Random stratified (or acyclic) program. Literals are ranked by a random
// permutation; default-negated dependencies always point strictly downward.
// Each atom is given a single head polarity so derived sets stay consistent.
inline ExtendedProgram random_program(Rng& rng, const ProgramOptions& opt = {}) {
  std::size_t n_atoms = 2 + rng.below(opt.max_atoms - 1);
  std::vector<Atom> atoms = atom_pool(n_atoms);

  std::vector<Literal> lits;
  for (const Atom& a : atoms) {
    lits.push_back({a, false});
    lits.push_back({a, true});
  }
  rng.shuffle(lits);
  auto rank = [&](const Literal& l) {
    for (std::size_t i = 0; i < lits.size(); ++i)
      if (lits[i] == l) return i;
    return lits.size();
  };

  std::vector<bool> head_neg(n_atoms);
  for (std::size_t i = 0; i < n_atoms; ++i) head_neg[i] = rng.chance(0.25);
  auto head_polarity = [&](const Atom& a) -> bool {
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (atoms[i] == a) return head_neg[i];
    return false;
  };
  if (!opt.allow_negated_heads) head_neg.assign(n_atoms, false);

  ExtendedProgram p;
  std::size_t n_clauses = 1 + rng.below(opt.max_clauses);
  for (std::size_t c = 0; c < n_clauses; ++c) {
    const Atom& head_atom = rng.pick(atoms);
    Literal head{head_atom, head_polarity(head_atom)};
    std::size_t hr = rank(head);

    Clause cl;
    cl.head = head;
    std::size_t body_len = rng.below(opt.max_body + 1);
    for (std::size_t b = 0; b < body_len; ++b) {
      const Literal& lit = rng.pick(lits);
      std::size_t lr = rank(lit);
      bool naf = rng.chance(0.4);
      if (naf || opt.strict_acyclic) {
        if (lr >= hr) continue;
      } else {
        if (lr > hr) continue;
        if (lit == head) continue;  // no trivial self-support
      }
      cl.body.push_back({lit, naf});
    }
    p.clauses.push_back(std::move(cl));
  }
  return p;
}

}  // namespace testgen
