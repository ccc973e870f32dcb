#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "deonnet/norms.hpp"
#include "deonnet/rng.hpp"

using namespace deonnet;
using namespace deonnet::norms;

namespace {

std::string fixture(const std::string& name) {
  std::ifstream in(std::string(DEONNET_FIXTURE_DIR) + "/" + name);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

NormativeCode load(const std::string& name) {
  return parse_code(fixture(name)).value();
}

std::vector<std::string> sorted_display(const logic::ExtendedProgram& p) {
  std::vector<std::string> lines;
  for (const logic::Clause& c : p.clauses) lines.push_back(display_clause(c));
  std::sort(lines.begin(), lines.end());
  return lines;
}

prop::Formula F(const char* s) { return prop::parse_formula(s); }

std::string dnf_str(const Dnf& d) {
  std::string out;
  for (std::size_t i = 0; i < d.disjuncts.size(); ++i) {
    if (i) out += " | ";
    if (d.disjuncts[i].empty()) out += "true";
    for (std::size_t j = 0; j < d.disjuncts[i].size(); ++j) {
      if (j) out += " & ";
      out += logic::print_literal(d.disjuncts[i][j]);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("to_dnf distributes conjunction over disjunction") {
  CHECK(dnf_str(to_dnf(F("(a | b) & c")).value()) == "a & c | b & c");
  CHECK(dnf_str(to_dnf(F("a & -a & b | c")).value()) == "c");
  CHECK(dnf_str(to_dnf(F("a & c | b & c")).value()) == "a & c | b & c");
  CHECK(dnf_str(to_dnf(F("c & a | b")).value()) == "c & a | b");
  CHECK(dnf_str(to_dnf(F("top")).value()) == "true");
}

TEST_CASE("to_dnf rejects formulas outside negation normal form") {
  auto r = to_dnf(F("-(a & b)"));
  REQUIRE(!r.ok());
  CHECK(r.error().code == Errc::not_nnf);
  CHECK(!to_dnf(F("a -> b")).ok());
}

TEST_CASE("instantiate splits disjuncts and head conjuncts") {
  NormativeCode code = load("normative_code.dnet");
  Instantiation inst = instantiate(code);
  REQUIRE(inst.instances.size() == 2);
  CHECK(display_clause(inst.instances[0].clause) == "-b <- a.");
  CHECK(display_clause(inst.instances[1].clause) == "c <- a.");
  CHECK(inst.instances[0].clause.head ==
        logic::Literal{logic::Atom{"out_b"}, true});
  CHECK(inst.instances[0].clause.body[0].lit ==
        logic::Literal{logic::Atom{"in_a"}, false});
  CHECK(inst.lifted.empty());
}

TEST_CASE("instantiate splits a disjunctive body into separate instances") {
  NormativeCode code = load("worked_example.dnet");
  Instantiation inst = instantiate(code);
  REQUIRE(inst.instances.size() == 3);
  CHECK(display_clause(inst.instances[0].clause) == "c <- a.");
  CHECK(display_clause(inst.instances[1].clause) == "c <- b.");
  CHECK(display_clause(inst.instances[2].clause) == "f <- d, e.");
  // r1 > r2 lifts to both instances of r1
  REQUIRE(inst.lifted.size() == 2);
  CHECK(inst.lifted[0] == std::pair<std::size_t, std::size_t>{0, 2});
  CHECK(inst.lifted[1] == std::pair<std::size_t, std::size_t>{1, 2});
}

TEST_CASE("a singleton rule instantiates to itself") {
  NormativeCode code = parse_code("rule R: (a & b, O(c)).").value();
  Instantiation inst = instantiate(code);
  REQUIRE(inst.instances.size() == 1);
  CHECK(display_clause(inst.instances[0].clause) == "c <- a, b.");
}

TEST_CASE("permissions outrank obligations with the complementary head") {
  NormativeCode code = load("normative_code.dnet");
  Instantiation inst = instantiate(code);
  auto pairs = permission_priorities(inst, code.permissions);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].first == 0);               // p
  CHECK(inst.instances[pairs[0].second].instance_label() == "r_1_1");

  NormativeCode worked = load("worked_example.dnet");
  Instantiation winst = instantiate(worked);
  auto wpairs = permission_priorities(winst, worked.permissions);
  REQUIRE(wpairs.size() == 1);
  CHECK(winst.instances[wpairs[0].second].parent_label == "r2");

  NormativeCode none =
      parse_code("rule R: (a, O(b)).\nperm P1: (c, P(b)).").value();
  Instantiation ninst = instantiate(none);
  CHECK(permission_priorities(ninst, none.permissions).empty());
}

TEST_CASE("priority encoding adds the distinguishing literals under naf") {
  NormativeCode code =
      parse_code("rule N1: (a1 & a3, O(b1)).\n"
                 "rule N2: (a2 & a3, O(b2)).\n"
                 "prio N1 > N2.")
          .value();
  auto program = compile(code).value();
  auto lines = sorted_display(program);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "b1 <- a1, a3.");
  CHECK(lines[1] == "b2 <- a2, a3, not a1.");
}

TEST_CASE("contrary-to-duty pair guards the primary norm") {
  NormativeCode code =
      parse_code("rule N5: (al, O(be)).\n"
                 "rule N6: (al & -be, O(ga)).\n"
                 "prio N6 > N5.")
          .value();
  auto program = compile(code).value();
  auto lines = sorted_display(program);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "be <- al, not -be.");
  CHECK(lines[1] == "ga <- al, -be.");
}

TEST_CASE("worked example compiles to the three expected clauses") {
  auto program = compile(load("worked_example.dnet")).value();
  std::vector<std::string> lines;
  for (const logic::Clause& c : program.clauses)
    lines.push_back(display_clause(c));
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "c <- a.");
  CHECK(lines[1] == "c <- b.");
  CHECK(lines[2] == "f <- d, e, not a, not b, not g.");
}

TEST_CASE("normative_code example compiles with the permission guard") {
  auto program = compile(load("normative_code.dnet")).value();
  REQUIRE(program.clauses.size() == 2);
  CHECK(logic::print_clause(program.clauses[0]) == "-out_b <- in_a, not in_d.");
  CHECK(logic::print_clause(program.clauses[1]) == "out_c <- in_a.");
}

TEST_CASE("empty code compiles to the empty program") {
  CHECK(compile(NormativeCode{}).value().clauses.empty());
}

TEST_CASE("robocup three-rule code compiles to three clauses") {
  auto program = compile(load("robocup3.dnet")).value();
  auto lines = sorted_display(program);
  REQUIRE(lines.size() == 3);
  CHECK(std::count(lines.begin(), lines.end(),
                   "impactingOpponent <- opponentShooting, closeToOpponent.") ==
        1);
}

TEST_CASE("robocup 26-rule fixture loads and compiles") {
  NormativeCode code = load("robocup26.dnet");
  CHECK(code.obligations.size() == 23);
  CHECK(code.permissions.size() == 3);
  CHECK(code.priorities.size() == 9);

  auto program = compile(code).value();
  CHECK(program.clauses.size() == 23);  // permissions emit no clauses
  CHECK(logic::stratify(program).ok());
  for (const logic::Clause& c : program.clauses) {
    CHECK(is_output_atom(c.head.atom));
    for (const logic::BodyLiteral& b : c.body) CHECK(is_input_atom(b.lit.atom));
  }

  // the exception R19 > R17 shows up as guards on R17's clause
  for (const logic::Clause& c : program.clauses) {
    if (c.label == "R17_1_1") {
      std::string s = display_clause(c);
      CHECK(s ==
            "impactingOpponent <- opponentShooting, CloseToOpponent, "
            "not -goalkeeper, not MateInsideOwnArea, not OpponentShooting.");
    }
  }
}

TEST_CASE("instance count equals disjuncts times head conjuncts") {
  Rng rng(2024);
  for (int round = 0; round < 50; ++round) {
    NormativeCode code;
    std::size_t expected = 0;
    std::size_t n_rules = 1 + rng.below(5);
    for (std::size_t r = 0; r < n_rules; ++r) {
      ObligationRule rule;
      rule.label = "R" + std::to_string(r);
      std::size_t nd = 1 + rng.below(3), nh = 1 + rng.below(3);
      for (std::size_t d = 0; d < nd; ++d) {
        std::vector<logic::Literal> disjunct;
        for (std::size_t l = 0; l <= rng.below(3); ++l)
          disjunct.push_back({logic::Atom{std::string(1, 'a' + (char)rng.below(6))},
                              rng.chance(0.3)});
        rule.body.disjuncts.push_back(disjunct);
      }
      for (std::size_t h = 0; h < nh; ++h)
        rule.head.push_back({logic::Atom{std::string(1, 'p' + (char)rng.below(6))},
                             rng.chance(0.3)});
      expected += nd * nh;
      code.obligations.push_back(std::move(rule));
    }
    CHECK(instantiate(code).instances.size() == expected);
  }
}

TEST_CASE("compilation is deterministic") {
  std::string text = fixture("robocup26.dnet");
  auto p1 = compile(parse_code(text).value()).value();
  auto p2 = compile(parse_code(text).value()).value();
  CHECK(logic::print_program(p1) == logic::print_program(p2));
}

TEST_CASE("conflict avoidance: the higher rule wins in shared contexts") {
  // For each declared pair, build the minimal context that satisfies both
  // original bodies and check that only the higher head is derived. Minimal
  // contexts keep unrelated higher-priority rules out of the picture.
  NormativeCode code = load("robocup26.dnet");
  auto program = compile(code).value();
  Instantiation inst = instantiate(code);

  for (const auto& [hi, lo] : code.priorities) {
    const ObligationRule* hrule = code.find_obligation(hi);
    const PermissionRule* hperm = code.find_permission(hi);
    const ObligationRule* lrule = code.find_obligation(lo);
    REQUIRE(lrule != nullptr);

    std::set<logic::Literal> context;
    auto add_body = [&](const Dnf& d) {
      for (const logic::Literal& l : d.disjuncts[0])
        context.insert({input_atom(l.atom.name), l.negated});
    };
    add_body(lrule->body);
    if (hrule) add_body(hrule->body);
    if (hperm) add_body(hperm->body);

    logic::ExtendedProgram with_facts = program;
    for (const logic::Literal& l : context)
      with_facts.clauses.push_back({std::nullopt, l, {}});
    auto as = logic::answer_set(with_facts);
    REQUIRE(as.ok());

    logic::Literal lower_head{output_atom(lrule->head[0].atom.name),
                              lrule->head[0].negated};
    CHECK(!as.value().contains(lower_head));
    if (hrule) {
      logic::Literal higher_head{output_atom(hrule->head[0].atom.name),
                                 hrule->head[0].negated};
      CHECK(as.value().contains(higher_head));
    }
  }
}

TEST_CASE("priority cycles are rejected") {
  auto r = parse_code(
      "rule A1: (a, O(x)).\nrule A2: (b, O(y)).\n"
      "prio A1 > A2.\nprio A2 > A1.");
  REQUIRE(!r.ok());
  CHECK(r.error().code == Errc::priority_cycle);
}

TEST_CASE("a priority the encoding cannot express is an error") {
  // higher body is a subset of the lower body
  auto code = parse_code(
      "rule A1: (a, O(x)).\nrule A2: (a & b, O(y)).\nprio A1 > A2.");
  REQUIRE(code.ok());
  auto program = compile(code.value());
  REQUIRE(!program.ok());
  CHECK(program.error().code == Errc::unresolvable_priority);
}

TEST_CASE("validation rejects malformed codes") {
  CHECK(parse_code("rule R: (a, O(x)).\nrule R: (b, O(y)).").error().code ==
        Errc::invalid_code);
  CHECK(parse_code("rule R: (a, O(x)).\nprio R > R.").error().code ==
        Errc::invalid_code);
  CHECK(parse_code("rule R: (a, O(x)).\nprio R > S.").error().code ==
        Errc::invalid_code);
  CHECK(parse_code("rule R: (a, O(x)).\nperm P1: (b, P(y)).\nprio R > P1.")
            .error()
            .code == Errc::invalid_code);
}

TEST_CASE("parse errors carry a position") {
  try {
    parse_code("rule R1 (a").value();
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 1);
    CHECK(e.col >= 9);
  }
}

TEST_CASE("excluded priorities are left unencoded") {
  NormativeCode code = load("worked_example.dnet");
  CompileOptions opts;
  opts.exclude_priorities.insert({"r1", "r2"});
  auto program = compile(code, opts).value();
  std::vector<std::string> lines;
  for (const logic::Clause& c : program.clauses)
    lines.push_back(display_clause(c));
  CHECK(lines[2] == "f <- d, e, not g.");

  opts.exclude_priorities.insert({"r3", "r2"});
  auto program2 = compile(code, opts).value();
  std::vector<std::string> lines2;
  for (const logic::Clause& c : program2.clauses)
    lines2.push_back(display_clause(c));
  CHECK(lines2[2] == "f <- d, e.");
}
