#include "deonnet/logic.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "deonnet/rng.hpp"

namespace deonnet {

std::string fnv1a_hex(std::string_view s) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a(s);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace deonnet

namespace deonnet::logic {

std::set<Atom> ExtendedProgram::vocabulary() const {
  std::set<Atom> v;
  for (const Clause& c : clauses) {
    v.insert(c.head.atom);
    for (const BodyLiteral& b : c.body) v.insert(b.lit.atom);
  }
  return v;
}

Truth3 truth_from_int(int v) {
  if (v < -1 || v > 1) throw std::invalid_argument("truth value out of range");
  return static_cast<Truth3>(v);
}

Interpretation3::Interpretation3(const std::set<Atom>& vocabulary, Truth3 init) {
  for (const Atom& a : vocabulary) values_[a] = init;
}

Truth3 Interpretation3::at(const Atom& a) const {
  auto it = values_.find(a);
  if (it == values_.end())
    throw std::invalid_argument("atom outside vocabulary: " + a.name);
  return it->second;
}

std::optional<Truth3> Interpretation3::find(const Atom& a) const {
  auto it = values_.find(a);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

void Interpretation3::set(const Atom& a, Truth3 v) {
  auto it = values_.find(a);
  if (it == values_.end())
    throw std::invalid_argument("atom outside vocabulary: " + a.name);
  it->second = v;
}

bool LiteralSet::consistent() const {
  for (const Literal& l : members)
    if (!l.negated && members.count(l.complement())) return false;
  return true;
}

bool LiteralSet::subset_of(const LiteralSet& other) const {
  return std::includes(other.members.begin(), other.members.end(),
                       members.begin(), members.end());
}

LiteralSet tp_step(const ExtendedProgram& p, const LiteralSet& current) {
  LiteralSet out;
  for (const Clause& c : p.clauses) {
    bool fires = true;
    for (const BodyLiteral& b : c.body) {
      if (b.naf ? current.contains(b.lit) : !current.contains(b.lit)) {
        fires = false;
        break;
      }
    }
    if (fires) out.insert(c.head);
  }
  return out;
}

namespace {

// Literal-level levels: positive body dependencies require
// level(head) >= level(lit), default-negated ones level(head) > level(lit).
// Unbounded growth means a cycle through default negation.
Expected<std::map<Literal, int>> literal_levels(const ExtendedProgram& p) {
  std::map<Literal, int> level;
  auto touch = [&](const Literal& l) { level.emplace(l, 0); };
  for (const Clause& c : p.clauses) {
    touch(c.head);
    for (const BodyLiteral& b : c.body) touch(b.lit);
  }
  const int limit = static_cast<int>(level.size()) + 1;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Clause& c : p.clauses) {
      int& h = level[c.head];
      for (const BodyLiteral& b : c.body) {
        int need = level[b.lit] + (b.naf ? 1 : 0);
        if (h < need) {
          h = need;
          changed = true;
          if (h > limit)
            return fail<std::map<Literal, int>>(
                Errc::cyclic_default_negation,
                "atom depends on itself through default negation: " +
                    print_literal(c.head));
        }
      }
    }
  }
  return level;
}

}  // namespace

Expected<std::vector<std::vector<Clause>>> stratify(const ExtendedProgram& p) {
  auto levels = literal_levels(p);
  if (!levels.ok())
    return Expected<std::vector<std::vector<Clause>>>(levels.error());

  std::set<int> used;
  for (const Clause& c : p.clauses) used.insert(levels.value().at(c.head));
  std::map<int, int> compact;
  int next = 0;
  for (int lv : used) compact[lv] = next++;

  std::vector<std::vector<Clause>> strata(used.size());
  for (const Clause& c : p.clauses)
    strata[static_cast<std::size_t>(compact[levels.value().at(c.head)])]
        .push_back(c);
  return strata;
}

Expected<LiteralSet> answer_set(const ExtendedProgram& p) {
  auto strata = stratify(p);
  if (!strata.ok()) return Expected<LiteralSet>(strata.error());

  LiteralSet s;
  ExtendedProgram sub;
  for (const auto& stratum : strata.value()) {
    for (const Clause& c : stratum) sub.clauses.push_back(c);
    for (;;) {
      LiteralSet derived = tp_step(sub, s);
      bool grew = false;
      for (const Literal& l : derived.members)
        if (s.members.insert(l).second) grew = true;
      if (!grew) break;
    }
  }
  if (!s.consistent())
    return fail<LiteralSet>(Errc::inconsistent,
                            "complementary literals derived");
  return s;
}

Expected<std::vector<LiteralSet>> brute_force_answer_sets(
    const ExtendedProgram& p) {
  std::set<Atom> vocab = p.vocabulary();
  if (vocab.size() > 16)
    return fail<std::vector<LiteralSet>>(Errc::vocabulary_too_large,
                                         "brute force limited to 16 atoms");
  std::vector<Atom> atoms(vocab.begin(), vocab.end());
  const std::size_t n = atoms.size();

  std::vector<LiteralSet> result;
  std::vector<int> state(n, 0);  // 0 absent, 1 positive, 2 negated
  for (;;) {
    LiteralSet candidate;
    for (std::size_t i = 0; i < n; ++i) {
      if (state[i] == 1) candidate.insert({atoms[i], false});
      if (state[i] == 2) candidate.insert({atoms[i], true});
    }

    // Reduct by the candidate, then its least model.
    ExtendedProgram reduct;
    for (const Clause& c : p.clauses) {
      bool deleted = false;
      Clause kept{c.label, c.head, {}};
      for (const BodyLiteral& b : c.body) {
        if (b.naf) {
          if (candidate.contains(b.lit)) {
            deleted = true;
            break;
          }
        } else {
          kept.body.push_back(b);
        }
      }
      if (!deleted) reduct.clauses.push_back(kept);
    }
    LiteralSet least;
    for (;;) {
      LiteralSet derived = tp_step(reduct, least);
      bool grew = false;
      for (const Literal& l : derived.members)
        if (least.members.insert(l).second) grew = true;
      if (!grew) break;
    }
    if (least == candidate) result.push_back(candidate);

    // Next base-3 state.
    std::size_t i = 0;
    while (i < n && state[i] == 2) state[i++] = 0;
    if (i == n) break;
    ++state[i];
  }
  return result;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;
  int line = 1;
  int col = 1;

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  void advance() {
    if (text[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void skip_ws_and_comments() {
    while (!eof()) {
      char c = peek();
      if (c == '%') {
        while (!eof() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  [[noreturn]] void err(const std::string& msg) const {
    throw ParseError(msg, line, col);
  }

  bool ident_start(char c) const {
    return std::isalpha(static_cast<unsigned char>(c));
  }
  bool ident_char(char c) const {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  std::string ident() {
    if (eof() || !ident_start(peek())) err("expected identifier");
    std::string s;
    while (!eof() && ident_char(peek())) {
      s.push_back(peek());
      advance();
    }
    return s;
  }

  bool try_consume(char c) {
    skip_ws_and_comments();
    if (!eof() && peek() == c) {
      advance();
      return true;
    }
    return false;
  }

  void expect(char c, const std::string& what) {
    skip_ws_and_comments();
    if (eof() || peek() != c) err("expected '" + what + "'");
    advance();
  }

  bool try_keyword(std::string_view kw) {
    skip_ws_and_comments();
    if (text.substr(pos, kw.size()) != kw) return false;
    std::size_t after = pos + kw.size();
    if (after < text.size() && ident_char(text[after])) return false;
    for (std::size_t i = 0; i < kw.size(); ++i) advance();
    return true;
  }
};

Literal parse_literal(Cursor& cur) {
  cur.skip_ws_and_comments();
  bool neg = false;
  if (!cur.eof() && cur.peek() == '-') {
    cur.advance();
    neg = true;
  }
  cur.skip_ws_and_comments();
  return Literal{Atom{cur.ident()}, neg};
}

}  // namespace

ExtendedProgram parse_program(std::string_view text) {
  ExtendedProgram p;
  Cursor cur{text};
  for (;;) {
    cur.skip_ws_and_comments();
    if (cur.eof()) break;
    Clause c;
    c.head = parse_literal(cur);
    cur.skip_ws_and_comments();
    if (!cur.eof() && cur.peek() == '<') {
      cur.advance();
      if (cur.eof() || cur.peek() != '-') cur.err("expected '<-'");
      cur.advance();
      for (;;) {
        BodyLiteral b;
        if (cur.try_keyword("not")) b.naf = true;
        b.lit = parse_literal(cur);
        c.body.push_back(b);
        if (!cur.try_consume(',')) break;
      }
    }
    cur.expect('.', ".");
    p.clauses.push_back(std::move(c));
  }
  return p;
}

std::string print_literal(const Literal& l) {
  return (l.negated ? "-" : "") + l.atom.name;
}

std::string print_clause(const Clause& c) {
  std::string out = print_literal(c.head);
  if (!c.body.empty()) {
    out += " <- ";
    for (std::size_t i = 0; i < c.body.size(); ++i) {
      if (i) out += ", ";
      if (c.body[i].naf) out += "not ";
      out += print_literal(c.body[i].lit);
    }
  }
  out += ".";
  return out;
}

std::string print_program(const ExtendedProgram& p) {
  std::string out;
  for (const Clause& c : p.clauses) {
    out += print_clause(c);
    out += "\n";
  }
  return out;
}

std::string print_literal_set(const LiteralSet& s) {
  std::string out = "{";
  bool first = true;
  for (const Literal& l : s.members) {
    if (!first) out += ", ";
    first = false;
    out += print_literal(l);
  }
  out += "}";
  return out;
}

}  // namespace deonnet::logic
