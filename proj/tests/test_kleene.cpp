#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <sstream>

#include "deonnet/kleene.hpp"
#include "deonnet/rng.hpp"

using namespace deonnet;
using namespace deonnet::kleene;

namespace {

Interpretation3 interp(std::initializer_list<std::pair<const char*, int>> vs) {
  std::set<Atom> vocab;
  for (auto& [n, v] : vs) vocab.insert(Atom{n});
  Interpretation3 i(vocab);
  for (auto& [n, v] : vs) i.set(Atom{n}, truth_from_int(v));
  return i;
}

std::string fixture_path(const std::string& name) {
  return std::string(DEONNET_FIXTURE_DIR) + "/" + name;
}

KProgram load_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name));
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_kprogram(ss.str());
}

// Random program over <= 8 atoms. When `acyclic`, bodies only mention
// strictly lower-numbered atoms.
KProgram random_kprogram(Rng& rng, bool acyclic) {
  std::size_t n_atoms = 2 + rng.below(7);
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < n_atoms; ++i)
    atoms.push_back(Atom{std::string(1, static_cast<char>('a' + i))});

  KProgram p;
  std::size_t n_clauses = 1 + rng.below(12);
  for (std::size_t c = 0; c < n_clauses; ++c) {
    std::size_t h = rng.below(n_atoms);
    KClause cl;
    cl.head = atoms[h];
    if (rng.chance(0.1)) {
      cl.body.push_back({rng.chance(0.5) ? KBodyLit::Kind::Verum
                                         : KBodyLit::Kind::Falsum,
                         {}, false});
    } else {
      std::size_t len = rng.below(3) + (acyclic && h == 0 ? 0 : 1);
      for (std::size_t b = 0; b < len; ++b) {
        std::size_t cap = acyclic ? h : n_atoms;
        if (cap == 0) break;
        cl.body.push_back({KBodyLit::Kind::Lit, atoms[rng.below(cap)],
                           rng.chance(0.4)});
      }
    }
    p.clauses.push_back(std::move(cl));
  }
  return p;
}

std::set<Atom> random_facts(Rng& rng, const KProgram& p, double prob = 0.3) {
  std::set<Atom> facts;
  for (const Atom& a : p.vocabulary())
    if (rng.chance(prob)) facts.insert(a);
  return facts;
}

}  // namespace

TEST_CASE("strong Kleene tables") {
  auto i = interp({{"u", 0}, {"f", -1}, {"t", 1}});
  auto U = KFormula::atom(Atom{"u"});
  auto F = KFormula::atom(Atom{"f"});
  auto T = KFormula::atom(Atom{"t"});

  CHECK(kleene_eval(KFormula::land(U, F), i).value() == Truth3::False);
  CHECK(kleene_eval(KFormula::lor(U, T), i).value() == Truth3::True);
  CHECK(kleene_eval(KFormula::lnot(U), i).value() == Truth3::Unknown);
  CHECK(kleene_eval(KFormula::land(U, T), i).value() == Truth3::Unknown);
  CHECK(kleene_eval(KFormula::lor(U, F), i).value() == Truth3::Unknown);

  CHECK(kleene_eval(KFormula::iff(T, T), i).value() == Truth3::True);
  CHECK(kleene_eval(KFormula::iff(T, F), i).value() == Truth3::False);
  CHECK(kleene_eval(KFormula::iff(U, U), i).value() == Truth3::Unknown);
  CHECK(kleene_eval(KFormula::iff(U, T), i).value() == Truth3::Unknown);

  CHECK(kleene_eval(KFormula::top(), i).value() == Truth3::True);
  CHECK(kleene_eval(KFormula::bot(), i).value() == Truth3::False);
}

TEST_CASE("kleene_eval rejects atoms outside the interpretation") {
  auto i = interp({{"p", 1}});
  auto r = kleene_eval(KFormula::atom(Atom{"q"}), i);
  REQUIRE(!r.ok());
  CHECK(r.error().code == Errc::unknown_atom);
}

TEST_CASE("completion disjoins defining bodies") {
  KProgram p = parse_kprogram("q <- p.\nq <- r.\n");
  CompletedTheory ct = complete(p);
  REQUIRE(ct.biconditionals.count(Atom{"q"}));
  CHECK(ct.biconditionals.at(Atom{"q"}).to_string() == "(p | r)");
  CHECK(ct.biconditionals.at(Atom{"p"}).to_string() == "bot");
  CHECK(ct.biconditionals.at(Atom{"r"}).to_string() == "bot");
}

TEST_CASE("completion closes undefined atoms to falsum") {
  KProgram p = parse_kprogram("q <- p, -ab.\nab <- bot.\n");
  CompletedTheory ct = complete(p);
  CHECK(ct.biconditionals.at(Atom{"q"}).to_string() == "(p & -ab)");
  CHECK(ct.biconditionals.at(Atom{"ab"}).to_string() == "bot");
  CHECK(ct.biconditionals.at(Atom{"p"}).to_string() == "bot");

  KProgram empty;
  empty.declared.insert(Atom{"a"});
  CompletedTheory ce = complete(empty);
  CHECK(ce.biconditionals.at(Atom{"a"}).to_string() == "bot");
}

TEST_CASE("minimal model of the brake scenario") {
  KProgram p = load_fixture("brake.klp");
  Interpretation3 m = minimal_model(p, {Atom{"press"}});
  CHECK(m.at(Atom{"press"}) == Truth3::True);
  CHECK(m.at(Atom{"ab"}) == Truth3::False);
  CHECK(m.at(Atom{"slow"}) == Truth3::True);
}

TEST_CASE("self-supporting atom stays unknown") {
  KProgram p = parse_kprogram("p <- p.\n");
  Interpretation3 m = minimal_model(p, {});
  CHECK(m.at(Atom{"p"}) == Truth3::Unknown);
}

TEST_CASE("verum-bodied clause makes its head true") {
  KProgram p = parse_kprogram("q <- top.\n");
  Interpretation3 m = minimal_model(p, {});
  CHECK(m.at(Atom{"q"}) == Truth3::True);
}

TEST_CASE("minimal model satisfies every biconditional of the completion") {
  Rng rng(301);
  for (int i = 0; i < 100; ++i) {
    KProgram p = random_kprogram(rng, /*acyclic=*/true);
    std::set<Atom> facts = random_facts(rng, p);
    Interpretation3 m = minimal_model(p, facts);
    CompletedTheory ct = complete(p.with_facts(facts));
    for (const auto& [atom, body] : ct.biconditionals) {
      auto v = kleene_eval(KFormula::iff(body, KFormula::atom(atom)), m);
      REQUIRE(v.ok());
      CHECK(v.value() == Truth3::True);
    }
  }
}

TEST_CASE("cyclic programs never falsify a biconditional") {
  Rng rng(911);
  for (int i = 0; i < 100; ++i) {
    KProgram p = random_kprogram(rng, /*acyclic=*/false);
    std::set<Atom> facts = random_facts(rng, p);
    Interpretation3 m = minimal_model(p, facts);
    for (const auto& [atom, body] : complete(p.with_facts(facts)).biconditionals) {
      auto v = kleene_eval(KFormula::iff(body, KFormula::atom(atom)), m);
      REQUIRE(v.ok());
      CHECK(v.value() != Truth3::False);
    }
  }
}

TEST_CASE("resolving an unknown fact only flips unknowns") {
  Rng rng(555);
  for (int i = 0; i < 100; ++i) {
    KProgram p = random_kprogram(rng, rng.chance(0.5));
    std::set<Atom> vocab = p.vocabulary();
    std::set<Atom> facts, open;
    for (const Atom& a : vocab) {
      if (rng.chance(0.2)) facts.insert(a);
      else if (rng.chance(0.3)) open.insert(a);
    }
    std::set<Atom> resolved, still_open = open;
    for (const Atom& a : open)
      if (rng.chance(0.5)) {
        resolved.insert(a);
        still_open.erase(a);
      }
    Interpretation3 before = minimal_model(p, facts, open);
    std::set<Atom> more = facts;
    more.insert(resolved.begin(), resolved.end());
    Interpretation3 after = minimal_model(p, more, still_open);
    for (const auto& [atom, v] : before.values()) {
      if (v == Truth3::Unknown) continue;
      CHECK(after.at(atom) == v);
    }
  }
}

TEST_CASE("query reduction: goal reduces to subgoals and fails without facts") {
  KProgram p = parse_kprogram("q <- p, -ab.\nab <- bot.\n");
  QueryOutcome out = sldnf_query(p, Atom{"q"});
  CHECK(out.result == QueryResult::Fails);
  CHECK(out.reduced_to(Atom{"q"}, Atom{"p"}));

  KProgram p2 = parse_kprogram("q <- p, -ab.\nab <- bot.\np.\n");
  QueryOutcome out2 = sldnf_query(p2, Atom{"q"});
  CHECK(out2.result == QueryResult::Succeeds);
}

TEST_CASE("query reduction hits the depth bound on cyclic programs") {
  KProgram p = parse_kprogram("p <- p.\n");
  QueryOutcome out = sldnf_query(p, Atom{"p"}, 100);
  CHECK(out.result == QueryResult::DepthExceeded);
}

TEST_CASE("queries agree with the minimal model on acyclic programs") {
  Rng rng(777);
  for (int i = 0; i < 100; ++i) {
    KProgram p = random_kprogram(rng, /*acyclic=*/true);
    std::set<Atom> facts = random_facts(rng, p);
    KProgram ext = p.with_facts(facts);
    Interpretation3 m = minimal_model(p, facts);
    for (const Atom& a : ext.vocabulary()) {
      QueryOutcome out = sldnf_query(ext, a);
      REQUIRE(out.result != QueryResult::DepthExceeded);
      Truth3 v = m.at(a);
      REQUIRE(v != Truth3::Unknown);
      CHECK((out.result == QueryResult::Succeeds) == (v == Truth3::True));
    }
  }
}

TEST_CASE("kleene text round-trip") {
  std::string text = "slow <- press, -ab.\nab <- bot.\nq.\n";
  KProgram p = parse_kprogram(text);
  CHECK(print_kprogram(p) == text);
  CHECK_THROWS_AS(parse_kprogram("top <- a.\n"), ParseError);
  CHECK_THROWS_AS(parse_kprogram("a <- -top.\n"), ParseError);
}
