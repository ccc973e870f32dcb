#include "deonnet/norms.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace deonnet::norms {

namespace {
constexpr const char* kInPrefix = "in_";
constexpr const char* kOutPrefix = "out_";
}  // namespace

Atom input_atom(const std::string& name) { return Atom{kInPrefix + name}; }
Atom output_atom(const std::string& name) { return Atom{kOutPrefix + name}; }
bool is_input_atom(const Atom& a) { return a.name.starts_with(kInPrefix); }
bool is_output_atom(const Atom& a) { return a.name.starts_with(kOutPrefix); }

std::string strip_namespace(const Atom& a) {
  if (is_input_atom(a)) return a.name.substr(3);
  if (is_output_atom(a)) return a.name.substr(4);
  return a.name;
}

const ObligationRule* NormativeCode::find_obligation(
    const std::string& label) const {
  for (const ObligationRule& r : obligations)
    if (r.label == label) return &r;
  return nullptr;
}

const PermissionRule* NormativeCode::find_permission(
    const std::string& label) const {
  for (const PermissionRule& r : permissions)
    if (r.label == label) return &r;
  return nullptr;
}

std::string RuleInstance::instance_label() const {
  return parent_label + "_" + std::to_string(disjunct_index) + "_" +
         std::to_string(conjunct_index);
}

// ---------------------------------------------------------------------------
// DNF normalization

Expected<Dnf> to_dnf(const prop::Formula& f) {
  using K = prop::Formula::Kind;
  switch (f.kind()) {
    case K::Top:
      return Dnf{{{}}};
    case K::Atom:
      return Dnf{{{Literal{Atom{f.atom_name()}, false}}}};
    case K::Not: {
      if (f.left().kind() != K::Atom)
        return fail<Dnf>(Errc::not_nnf,
                         "negation applied to " + f.left().to_string());
      return Dnf{{{Literal{Atom{f.left().atom_name()}, true}}}};
    }
    case K::Or: {
      auto l = to_dnf(f.left());
      if (!l.ok()) return l;
      auto r = to_dnf(f.right());
      if (!r.ok()) return r;
      Dnf out = l.value();
      out.disjuncts.insert(out.disjuncts.end(), r.value().disjuncts.begin(),
                           r.value().disjuncts.end());
      // drop duplicate disjuncts (as sets), keeping first occurrence
      std::vector<std::vector<Literal>> dedup;
      std::set<std::set<Literal>> seen;
      for (auto& d : out.disjuncts) {
        std::set<Literal> key(d.begin(), d.end());
        if (seen.insert(key).second) dedup.push_back(std::move(d));
      }
      out.disjuncts = std::move(dedup);
      return out;
    }
    case K::And: {
      auto l = to_dnf(f.left());
      if (!l.ok()) return l;
      auto r = to_dnf(f.right());
      if (!r.ok()) return r;
      Dnf out;
      std::set<std::set<Literal>> seen;
      for (const auto& dl : l.value().disjuncts) {
        for (const auto& dr : r.value().disjuncts) {
          std::vector<Literal> merged = dl;
          bool contradictory = false;
          for (const Literal& lit : dr) {
            if (std::find(merged.begin(), merged.end(), lit) != merged.end())
              continue;
            if (std::find(merged.begin(), merged.end(), lit.complement()) !=
                merged.end()) {
              contradictory = true;
              break;
            }
            merged.push_back(lit);
          }
          for (std::size_t i = 0; !contradictory && i < merged.size(); ++i)
            for (std::size_t j = i + 1; j < merged.size(); ++j)
              if (merged[i] == merged[j].complement()) contradictory = true;
          if (contradictory) continue;
          std::set<Literal> key(merged.begin(), merged.end());
          if (seen.insert(key).second) out.disjuncts.push_back(std::move(merged));
        }
      }
      return out;
    }
    case K::Implies:
      return fail<Dnf>(Errc::not_nnf, "implication is not allowed here");
  }
  return fail<Dnf>(Errc::not_nnf, "unsupported connective");
}

// ---------------------------------------------------------------------------
// Validation

Expected<void*> validate(const NormativeCode& code) {
  auto invalid = [](const std::string& msg) {
    return fail<void*>(Errc::invalid_code, msg);
  };

  std::set<std::string> labels;
  for (const ObligationRule& r : code.obligations) {
    if (r.label.empty()) return invalid("obligation without label");
    if (!labels.insert(r.label).second)
      return invalid("duplicate label " + r.label);
    if (r.head.empty())
      return invalid("obligation " + r.label + " has an empty head");
  }
  for (const PermissionRule& r : code.permissions) {
    if (r.label.empty()) return invalid("permission without label");
    if (!labels.insert(r.label).second)
      return invalid("duplicate label " + r.label);
  }

  for (const auto& [hi, lo] : code.priorities) {
    if (!labels.count(hi)) return invalid("priority references " + hi);
    if (!labels.count(lo)) return invalid("priority references " + lo);
    if (hi == lo) return invalid("priority must be irreflexive: " + hi);
    if (code.find_permission(lo))
      return invalid("lower side of a priority must be an obligation: " + lo);
  }

  // acyclicity of the declared relation
  std::map<std::string, std::vector<std::string>> below;
  for (const auto& [hi, lo] : code.priorities) below[hi].push_back(lo);
  std::map<std::string, int> state;  // 0 new, 1 open, 2 done
  std::vector<std::string> stack;
  for (const auto& [start, _] : below) {
    if (state[start]) continue;
    stack.push_back(start);
    std::vector<std::pair<std::string, std::size_t>> path{{start, 0}};
    state[start] = 1;
    while (!path.empty()) {
      auto& [node, next] = path.back();
      auto& kids = below[node];
      if (next >= kids.size()) {
        state[node] = 2;
        path.pop_back();
        continue;
      }
      const std::string& kid = kids[next++];
      if (state[kid] == 1)
        return fail<void*>(Errc::priority_cycle,
                           "priority cycle through " + kid);
      if (state[kid] == 0) {
        state[kid] = 1;
        path.push_back({kid, 0});
      }
    }
  }
  return static_cast<void*>(nullptr);
}

// ---------------------------------------------------------------------------
// Instantiation

namespace {

Literal ns_in(const Literal& l) { return {input_atom(l.atom.name), l.negated}; }
Literal ns_out(const Literal& l) {
  return {output_atom(l.atom.name), l.negated};
}

std::vector<Literal> ns_in_all(const std::vector<Literal>& ls) {
  std::vector<Literal> out;
  out.reserve(ls.size());
  for (const Literal& l : ls) out.push_back(ns_in(l));
  return out;
}

}  // namespace

Instantiation instantiate(const NormativeCode& code) {
  Instantiation out;
  std::map<std::string, std::vector<std::size_t>> by_parent;

  for (const ObligationRule& r : code.obligations) {
    int di = 1;
    for (const std::vector<Literal>& disjunct : r.body.disjuncts) {
      int ci = 1;
      for (const Literal& conjunct : r.head) {
        RuleInstance inst;
        inst.parent_label = r.label;
        inst.disjunct_index = di;
        inst.conjunct_index = ci;
        inst.clause.head = ns_out(conjunct);
        for (const Literal& l : disjunct)
          inst.clause.body.push_back({ns_in(l), false});
        inst.clause.label = inst.instance_label();
        by_parent[r.label].push_back(out.instances.size());
        out.instances.push_back(std::move(inst));
        ++ci;
      }
      ++di;
    }
  }

  for (const auto& [hi, lo] : code.priorities) {
    if (!code.find_obligation(hi)) continue;  // permission-headed pairs later
    for (std::size_t h : by_parent[hi])
      for (std::size_t l : by_parent[lo]) out.lifted.emplace_back(h, l);
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> permission_priorities(
    const Instantiation& inst,
    const std::vector<PermissionRule>& permissions) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t p = 0; p < permissions.size(); ++p) {
    Literal forbidden = ns_out(permissions[p].head.complement());
    for (std::size_t i = 0; i < inst.instances.size(); ++i)
      if (inst.instances[i].clause.head == forbidden) pairs.emplace_back(p, i);
  }
  return pairs;
}

// ---------------------------------------------------------------------------
// Priority encoding

namespace {

bool body_has(const Clause& c, const Literal& l) {
  for (const logic::BodyLiteral& b : c.body)
    if (!b.naf && b.lit == l) return true;
  return false;
}

bool body_has_naf(const Clause& c, const Literal& l) {
  for (const logic::BodyLiteral& b : c.body)
    if (b.naf && b.lit == l) return true;
  return false;
}

// Append `not L` for every literal of `higher_body` the lower clause does not
// already carry positively. Returns false when nothing distinguishes the
// higher body, in which case the priority cannot be expressed.
bool guard_with(Clause& lower, const std::vector<Literal>& higher_body) {
  std::vector<Literal> missing;
  for (const Literal& l : higher_body)
    if (!body_has(lower, l)) missing.push_back(l);
  if (missing.empty()) return false;
  for (const Literal& l : missing)
    if (!body_has_naf(lower, l)) lower.body.push_back({l, true});
  return true;
}

}  // namespace

Expected<ExtendedProgram> encode_priorities(
    const Instantiation& inst, const NormativeCode& code,
    const std::vector<std::pair<std::size_t, std::size_t>>& perm_pairs) {
  std::vector<Clause> clauses;
  clauses.reserve(inst.instances.size());
  for (const RuleInstance& r : inst.instances) clauses.push_back(r.clause);

  for (const auto& [hi, lo] : inst.lifted) {
    std::vector<Literal> higher_body;
    for (const logic::BodyLiteral& b : inst.instances[hi].clause.body)
      higher_body.push_back(b.lit);
    if (!guard_with(clauses[lo], higher_body))
      return fail<ExtendedProgram>(
          Errc::unresolvable_priority,
          inst.instances[hi].instance_label() + " > " +
              inst.instances[lo].instance_label() +
              ": higher body adds no literal to negate");
  }

  for (const auto& [p, lo] : perm_pairs) {
    const PermissionRule& perm = code.permissions[p];
    // a permission with a disjunctive body guards through each disjunct
    for (const std::vector<Literal>& disjunct : perm.body.disjuncts) {
      if (!guard_with(clauses[lo], ns_in_all(disjunct)))
        return fail<ExtendedProgram>(
            Errc::unresolvable_priority,
            perm.label + " > " + inst.instances[lo].instance_label() +
                ": permission body adds no literal to negate");
    }
  }

  ExtendedProgram out;
  out.clauses = std::move(clauses);
  return out;
}

Expected<ExtendedProgram> compile(const NormativeCode& code,
                                  const CompileOptions& opts) {
  auto valid = validate(code);
  if (!valid.ok()) return Expected<ExtendedProgram>(valid.error());

  NormativeCode pruned = code;
  if (!opts.exclude_priorities.empty()) {
    std::erase_if(pruned.priorities, [&](const auto& pr) {
      return opts.exclude_priorities.count(pr) != 0;
    });
  }

  Instantiation inst = instantiate(pruned);

  auto perm_pairs = permission_priorities(inst, pruned.permissions);
  // declared permission-over-obligation pairs first, then the induced ones
  std::vector<std::pair<std::size_t, std::size_t>> ordered;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& [hi, lo] : pruned.priorities) {
    const PermissionRule* perm = pruned.find_permission(hi);
    if (!perm) continue;
    std::size_t p =
        static_cast<std::size_t>(perm - pruned.permissions.data());
    for (std::size_t i = 0; i < inst.instances.size(); ++i)
      if (inst.instances[i].parent_label == lo && seen.emplace(p, i).second)
        ordered.emplace_back(p, i);
  }
  for (const auto& pair : perm_pairs) {
    if (opts.exclude_priorities.count(
            {pruned.permissions[pair.first].label,
             inst.instances[pair.second].parent_label}))
      continue;
    if (seen.insert(pair).second) ordered.push_back(pair);
  }

  auto program = encode_priorities(inst, pruned, ordered);
  if (!program.ok()) return program;

  // By construction bodies mention only input atoms and heads only output
  // atoms, which keeps the program stratified. Guard against regressions.
  for (const Clause& c : program.value().clauses) {
    if (!is_output_atom(c.head.atom))
      throw std::logic_error("compiled head outside output namespace");
    for (const logic::BodyLiteral& b : c.body)
      if (!is_input_atom(b.lit.atom))
        throw std::logic_error("compiled body outside input namespace");
  }
  if (!logic::stratify(program.value()).ok())
    throw std::logic_error("compiled program is not stratified");
  return program;
}

// ---------------------------------------------------------------------------
// DSL

namespace {

struct NCursor {
  std::string_view text;
  std::size_t pos = 0;
  int line = 1, col = 1;

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  void advance() {
    if (text[pos] == '\n') { ++line; col = 1; } else { ++col; }
    ++pos;
  }
  void skip() {
    while (!eof()) {
      if (peek() == '%') {
        while (!eof() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(peek()))) {
        advance();
      } else break;
    }
  }
  [[noreturn]] void err(const std::string& m) const {
    throw ParseError(m, line, col);
  }
  std::string ident() {
    skip();
    if (eof() || !std::isalpha(static_cast<unsigned char>(peek())))
      err("expected identifier");
    std::string s;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) ||
                      peek() == '_')) {
      s.push_back(peek());
      advance();
    }
    return s;
  }
  void expect(char c) {
    skip();
    if (eof() || peek() != c)
      err(std::string("expected '") + c + "'");
    advance();
  }

  // formula text up to the comma separating body from head, tracking parens
  std::string formula_until_comma() {
    skip();
    std::string s;
    int depth = 0;
    while (!eof()) {
      char c = peek();
      if (c == '(') ++depth;
      if (c == ')') {
        if (depth == 0) break;
        --depth;
      }
      if (c == ',' && depth == 0) break;
      if (c == '.') err("unexpected '.' inside rule");
      s.push_back(c);
      advance();
    }
    return s;
  }
};

Literal parse_dsl_literal(NCursor& cur) {
  cur.skip();
  bool neg = false;
  if (!cur.eof() && cur.peek() == '-') {
    cur.advance();
    neg = true;
  }
  return Literal{Atom{cur.ident()}, neg};
}

Expected<Dnf> formula_to_dnf(const std::string& text, NCursor& cur) {
  if (text.find_first_not_of(" \t\n") == std::string::npos)
    cur.err("empty formula");
  prop::Formula f = [&] {
    try {
      return prop::parse_formula(text);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), cur.line, cur.col);
    }
  }();
  auto dnf = to_dnf(f);
  if (dnf.ok() && dnf.value().disjuncts.empty())
    return fail<Dnf>(Errc::invalid_code, "rule body is unsatisfiable");
  return dnf;
}

// `true` parses as the verum formula
std::string desugar_true(std::string s) {
  // prop::parse_formula knows `top`; the DSL writes `true`
  std::string out;
  for (std::size_t i = 0; i < s.size();) {
    if ((i == 0 || !std::isalnum(static_cast<unsigned char>(s[i - 1]))) &&
        s.compare(i, 4, "true") == 0 &&
        (i + 4 >= s.size() ||
         (!std::isalnum(static_cast<unsigned char>(s[i + 4])) &&
          s[i + 4] != '_'))) {
      out += "top";
      i += 4;
    } else {
      out += s[i];
      ++i;
    }
  }
  return out;
}

}  // namespace

Expected<NormativeCode> parse_code(std::string_view text) {
  NormativeCode code;
  NCursor cur{text};
  for (;;) {
    cur.skip();
    if (cur.eof()) break;
    std::string kw = cur.ident();
    if (kw == "rule" || kw == "perm") {
      std::string label = cur.ident();
      cur.expect(':');
      cur.expect('(');
      std::string body_text = desugar_true(cur.formula_until_comma());
      cur.expect(',');
      cur.skip();
      std::string op = cur.ident();
      if (kw == "rule" && op != "O") cur.err("expected O(...) head");
      if (kw == "perm" && op != "P") cur.err("expected P(...) head");
      cur.expect('(');

      auto dnf = formula_to_dnf(body_text, cur);
      if (!dnf.ok()) return Expected<NormativeCode>(dnf.error());

      if (kw == "rule") {
        ObligationRule r;
        r.label = label;
        r.body = dnf.value();
        r.head.push_back(parse_dsl_literal(cur));
        for (;;) {
          cur.skip();
          if (!cur.eof() && cur.peek() == '&') {
            cur.advance();
            r.head.push_back(parse_dsl_literal(cur));
          } else break;
        }
        cur.expect(')');
        cur.expect(')');
        cur.expect('.');
        code.obligations.push_back(std::move(r));
      } else {
        PermissionRule r;
        r.label = label;
        r.body = dnf.value();
        r.head = parse_dsl_literal(cur);
        cur.expect(')');
        cur.expect(')');
        cur.expect('.');
        code.permissions.push_back(std::move(r));
      }
    } else if (kw == "prio") {
      std::string hi = cur.ident();
      cur.expect('>');
      std::string lo = cur.ident();
      cur.expect('.');
      code.priorities.emplace_back(hi, lo);
    } else {
      cur.err("expected 'rule', 'perm' or 'prio'");
    }
  }
  auto valid = validate(code);
  if (!valid.ok()) return Expected<NormativeCode>(valid.error());
  return code;
}

std::string display_clause(const Clause& c) {
  Clause bare = c;
  bare.head.atom = Atom{strip_namespace(c.head.atom)};
  for (logic::BodyLiteral& b : bare.body)
    b.lit.atom = Atom{strip_namespace(b.lit.atom)};
  return logic::print_clause(bare);
}

std::string display_program(const ExtendedProgram& p) {
  std::string out;
  for (const Clause& c : p.clauses) {
    out += display_clause(c);
    out += "\n";
  }
  return out;
}

}  // namespace deonnet::norms
