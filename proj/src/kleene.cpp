#include "deonnet/kleene.hpp"

#include <algorithm>
#include <cctype>

namespace deonnet::kleene {

// ---------------------------------------------------------------------------
// KFormula

KFormula KFormula::top() {
  return wrap(std::make_shared<Node>(Node{Kind::Top, {}, nullptr, nullptr}));
}
KFormula KFormula::bot() {
  return wrap(std::make_shared<Node>(Node{Kind::Bot, {}, nullptr, nullptr}));
}
KFormula KFormula::atom(Atom a) {
  return wrap(
      std::make_shared<Node>(Node{Kind::Atom, std::move(a), nullptr, nullptr}));
}
KFormula KFormula::lnot(KFormula f) {
  return wrap(std::make_shared<Node>(Node{Kind::Not, {}, f.node_, nullptr}));
}
KFormula KFormula::land(KFormula l, KFormula r) {
  return wrap(std::make_shared<Node>(Node{Kind::And, {}, l.node_, r.node_}));
}
KFormula KFormula::lor(KFormula l, KFormula r) {
  return wrap(std::make_shared<Node>(Node{Kind::Or, {}, l.node_, r.node_}));
}
KFormula KFormula::iff(KFormula l, KFormula r) {
  return wrap(std::make_shared<Node>(Node{Kind::Iff, {}, l.node_, r.node_}));
}

void KFormula::collect_atoms(std::set<Atom>& out) const {
  switch (kind()) {
    case Kind::Top:
    case Kind::Bot:
      return;
    case Kind::Atom:
      out.insert(node_->atom);
      return;
    case Kind::Not:
      wrap(node_->left).collect_atoms(out);
      return;
    default:
      wrap(node_->left).collect_atoms(out);
      wrap(node_->right).collect_atoms(out);
  }
}

std::string KFormula::to_string() const {
  switch (kind()) {
    case Kind::Top: return "top";
    case Kind::Bot: return "bot";
    case Kind::Atom: return node_->atom.name;
    case Kind::Not: return "-" + wrap(node_->left).to_string();
    case Kind::And:
      return "(" + wrap(node_->left).to_string() + " & " +
             wrap(node_->right).to_string() + ")";
    case Kind::Or:
      return "(" + wrap(node_->left).to_string() + " | " +
             wrap(node_->right).to_string() + ")";
    case Kind::Iff:
      return "(" + wrap(node_->left).to_string() + " <-> " +
             wrap(node_->right).to_string() + ")";
  }
  return "?";
}

Expected<Truth3> kleene_eval(const KFormula& f, const Interpretation3& i) {
  using K = KFormula::Kind;
  switch (f.kind()) {
    case K::Top:
      return Truth3::True;
    case K::Bot:
      return Truth3::False;
    case K::Atom: {
      auto v = i.find(f.atom_name());
      if (!v)
        return fail<Truth3>(Errc::unknown_atom, f.atom_name().name);
      return *v;
    }
    case K::Not: {
      auto v = kleene_eval(f.left(), i);
      if (!v.ok()) return v;
      return truth_from_int(-truth_to_int(v.value()));
    }
    case K::And:
    case K::Or: {
      auto l = kleene_eval(f.left(), i);
      if (!l.ok()) return l;
      auto r = kleene_eval(f.right(), i);
      if (!r.ok()) return r;
      int a = truth_to_int(l.value()), b = truth_to_int(r.value());
      return truth_from_int(f.kind() == K::And ? std::min(a, b)
                                               : std::max(a, b));
    }
    case K::Iff: {
      auto l = kleene_eval(f.left(), i);
      if (!l.ok()) return l;
      auto r = kleene_eval(f.right(), i);
      if (!r.ok()) return r;
      Truth3 a = l.value(), b = r.value();
      if (a == Truth3::Unknown || b == Truth3::Unknown)
        return Truth3::Unknown;
      return a == b ? Truth3::True : Truth3::False;
    }
  }
  return Truth3::Unknown;
}

// ---------------------------------------------------------------------------
// Programs

std::set<Atom> KProgram::vocabulary() const {
  std::set<Atom> v = declared;
  for (const KClause& c : clauses) {
    v.insert(c.head);
    for (const KBodyLit& b : c.body)
      if (b.kind == KBodyLit::Kind::Lit) v.insert(b.atom);
  }
  return v;
}

KProgram KProgram::with_facts(const std::set<Atom>& facts) const {
  KProgram out = *this;
  for (const Atom& a : facts)
    out.clauses.push_back(KClause{a, {KBodyLit{KBodyLit::Kind::Verum, {}, false}}});
  return out;
}

namespace {

KFormula body_lit_formula(const KBodyLit& b) {
  switch (b.kind) {
    case KBodyLit::Kind::Verum:
      return KFormula::top();
    case KBodyLit::Kind::Falsum:
      return KFormula::bot();
    case KBodyLit::Kind::Lit:
    default:
      return b.negated ? KFormula::lnot(KFormula::atom(b.atom))
                       : KFormula::atom(b.atom);
  }
}

KFormula body_formula(const std::vector<KBodyLit>& body) {
  if (body.empty()) return KFormula::top();
  KFormula f = body_lit_formula(body[0]);
  for (std::size_t i = 1; i < body.size(); ++i)
    f = KFormula::land(f, body_lit_formula(body[i]));
  return f;
}

Truth3 eval_body(const std::vector<KBodyLit>& body, const Interpretation3& i) {
  int acc = 1;
  for (const KBodyLit& b : body) {
    int v;
    switch (b.kind) {
      case KBodyLit::Kind::Verum: v = 1; break;
      case KBodyLit::Kind::Falsum: v = -1; break;
      default: {
        auto t = i.find(b.atom);
        v = t ? truth_to_int(*t) : 0;
        if (b.negated) v = -v;
      }
    }
    acc = std::min(acc, v);
  }
  return truth_from_int(acc);
}

}  // namespace

CompletedTheory complete(const KProgram& p) {
  CompletedTheory out;
  std::map<Atom, std::vector<const KClause*>> defs;
  for (const KClause& c : p.clauses) defs[c.head].push_back(&c);

  for (const Atom& a : p.vocabulary()) {
    auto it = defs.find(a);
    if (it == defs.end()) {
      out.biconditionals.emplace(a, KFormula::bot());
      continue;
    }
    KFormula f = body_formula(it->second[0]->body);
    for (std::size_t i = 1; i < it->second.size(); ++i)
      f = KFormula::lor(f, body_formula(it->second[i]->body));
    out.biconditionals.emplace(a, f);
  }
  return out;
}

Interpretation3 minimal_model(const KProgram& p, const std::set<Atom>& facts,
                              const std::set<Atom>& unknown_facts) {
  KProgram ext = p.with_facts(facts);
  std::set<Atom> vocab = ext.vocabulary();
  for (const Atom& a : unknown_facts) vocab.insert(a);

  std::map<Atom, std::vector<const std::vector<KBodyLit>*>> defs;
  for (const KClause& c : ext.clauses) defs[c.head].push_back(&c.body);

  Interpretation3 i(vocab, Truth3::Unknown);
  for (;;) {
    Interpretation3 next = i;
    for (const Atom& a : vocab) {
      auto it = defs.find(a);
      bool open = unknown_facts.count(a) != 0;
      bool any_true = false;
      bool all_false = !open;
      if (it != defs.end()) {
        for (const auto* body : it->second) {
          Truth3 v = eval_body(*body, i);
          if (v == Truth3::True) any_true = true;
          if (v != Truth3::False) all_false = false;
        }
      } else if (open) {
        all_false = false;
      }
      next.set(a, any_true ? Truth3::True
                           : (all_false ? Truth3::False : Truth3::Unknown));
    }
    if (next == i) return i;
    i = next;
  }
}

// ---------------------------------------------------------------------------
// Query reduction

namespace {

struct QueryCtx {
  const std::map<Atom, std::vector<const KClause*>>& defs;
  std::vector<TraceStep>& trace;

  QueryResult prove_atom(const Atom& goal, int depth) {
    trace.push_back({TraceStep::Kind::Query, depth, goal, -1, {}});
    if (depth <= 0) {
      trace.push_back({TraceStep::Kind::DepthExceeded, depth, goal, -1, {}});
      return QueryResult::DepthExceeded;
    }
    auto it = defs.find(goal);
    if (it == defs.end()) {
      trace.push_back({TraceStep::Kind::NoClauses, depth, goal, -1, {}});
      return QueryResult::Fails;
    }
    int idx = 0;
    for (const KClause* c : it->second) {
      trace.push_back(
          {TraceStep::Kind::Reduce, depth, goal, idx, c->body});
      QueryResult r = prove_body(c->body, depth - 1);
      if (r == QueryResult::Succeeds) {
        trace.push_back({TraceStep::Kind::Succeeds, depth, goal, idx, {}});
        return r;
      }
      if (r == QueryResult::DepthExceeded) return r;
      trace.push_back({TraceStep::Kind::ClauseFails, depth, goal, idx, {}});
      ++idx;
    }
    trace.push_back({TraceStep::Kind::Fails, depth, goal, -1, {}});
    return QueryResult::Fails;
  }

  QueryResult prove_body(const std::vector<KBodyLit>& body, int depth) {
    for (const KBodyLit& b : body) {
      switch (b.kind) {
        case KBodyLit::Kind::Verum:
          break;
        case KBodyLit::Kind::Falsum:
          return QueryResult::Fails;
        case KBodyLit::Kind::Lit: {
          QueryResult sub = prove_atom(b.atom, depth);
          if (sub == QueryResult::DepthExceeded) return sub;
          if (b.negated) {
            // negation as finite failure
            if (sub == QueryResult::Succeeds) {
              trace.push_back(
                  {TraceStep::Kind::NafFails, depth, b.atom, -1, {}});
              return QueryResult::Fails;
            }
            trace.push_back(
                {TraceStep::Kind::NafSucceeds, depth, b.atom, -1, {}});
          } else if (sub == QueryResult::Fails) {
            return QueryResult::Fails;
          }
        }
      }
    }
    return QueryResult::Succeeds;
  }
};

std::string body_to_string(const std::vector<KBodyLit>& body) {
  if (body.empty()) return "top";
  std::string out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (i) out += ", ";
    const KBodyLit& b = body[i];
    if (b.kind == KBodyLit::Kind::Verum) out += "top";
    else if (b.kind == KBodyLit::Kind::Falsum) out += "bot";
    else out += (b.negated ? "-" : "") + b.atom.name;
  }
  return out;
}

}  // namespace

std::string TraceStep::render() const {
  std::string pad(static_cast<std::size_t>(std::max(0, 20 - depth)) * 2, ' ');
  switch (kind) {
    case Kind::Query: return pad + "?" + goal.name;
    case Kind::Reduce:
      return pad + "reduce " + goal.name + " to " + body_to_string(subgoals);
    case Kind::ClauseFails:
      return pad + "clause " + std::to_string(clause_index) + " for " +
             goal.name + " fails";
    case Kind::NafSucceeds:
      return pad + "-" + goal.name + " succeeds by negation-as-failure";
    case Kind::NafFails: return pad + "-" + goal.name + " fails";
    case Kind::NoClauses: return pad + goal.name + ": no clauses, fails";
    case Kind::Succeeds: return pad + goal.name + " succeeds";
    case Kind::Fails: return pad + goal.name + " fails";
    case Kind::DepthExceeded: return pad + goal.name + ": depth exceeded";
  }
  return "";
}

bool QueryOutcome::reduced_to(const Atom& goal, const Atom& sub) const {
  for (const TraceStep& s : trace) {
    if (s.kind != TraceStep::Kind::Reduce || !(s.goal == goal)) continue;
    for (const KBodyLit& b : s.subgoals)
      if (b.kind == KBodyLit::Kind::Lit && b.atom == sub) return true;
  }
  return false;
}

QueryOutcome sldnf_query(const KProgram& p, const Atom& goal, int depth_limit) {
  std::map<Atom, std::vector<const KClause*>> defs;
  for (const KClause& c : p.clauses) defs[c.head].push_back(&c);

  QueryOutcome out{QueryResult::Fails, {}};
  QueryCtx ctx{defs, out.trace};
  out.result = ctx.prove_atom(goal, depth_limit);
  return out;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

struct KCursor {
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
};

KBodyLit parse_kbody_lit(KCursor& cur) {
  cur.skip();
  bool neg = false;
  if (!cur.eof() && cur.peek() == '-') {
    cur.advance();
    neg = true;
    cur.skip();
  }
  std::string name = cur.ident();
  if (name == "top" || name == "bot") {
    if (neg) cur.err("constants cannot be negated");
    return KBodyLit{name == "top" ? KBodyLit::Kind::Verum
                                  : KBodyLit::Kind::Falsum,
                    {}, false};
  }
  return KBodyLit{KBodyLit::Kind::Lit, Atom{name}, neg};
}

}  // namespace

KProgram parse_kprogram(std::string_view text) {
  KProgram p;
  KCursor cur{text};
  for (;;) {
    cur.skip();
    if (cur.eof()) break;
    KClause c;
    c.head = Atom{cur.ident()};
    if (c.head.name == "top" || c.head.name == "bot")
      cur.err("constants cannot head a clause");
    cur.skip();
    if (!cur.eof() && cur.peek() == '<') {
      cur.advance();
      if (cur.eof() || cur.peek() != '-') cur.err("expected '<-'");
      cur.advance();
      for (;;) {
        c.body.push_back(parse_kbody_lit(cur));
        cur.skip();
        if (!cur.eof() && cur.peek() == ',') { cur.advance(); continue; }
        break;
      }
    }
    cur.skip();
    if (cur.eof() || cur.peek() != '.') cur.err("expected '.'");
    cur.advance();
    p.clauses.push_back(std::move(c));
  }
  return p;
}

std::string print_kprogram(const KProgram& p) {
  std::string out;
  for (const KClause& c : p.clauses) {
    out += c.head.name;
    if (!c.body.empty()) {
      out += " <- ";
      out += body_to_string(c.body);
    }
    out += ".\n";
  }
  return out;
}

}  // namespace deonnet::kleene
