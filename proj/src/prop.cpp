#include "deonnet/prop.hpp"

#include <cctype>

namespace deonnet::prop {

Formula Formula::top() {
  return Formula(std::make_shared<Node>(Node{Kind::Top, {}, nullptr, nullptr}));
}
Formula Formula::atom(std::string name) {
  return Formula(std::make_shared<Node>(
      Node{Kind::Atom, std::move(name), nullptr, nullptr}));
}
Formula Formula::lnot(Formula f) {
  return Formula(std::make_shared<Node>(Node{Kind::Not, {}, f.node_, nullptr}));
}
Formula Formula::land(Formula l, Formula r) {
  return Formula(std::make_shared<Node>(Node{Kind::And, {}, l.node_, r.node_}));
}
Formula Formula::lor(Formula l, Formula r) {
  return Formula(std::make_shared<Node>(Node{Kind::Or, {}, l.node_, r.node_}));
}
Formula Formula::implies(Formula l, Formula r) {
  return Formula(
      std::make_shared<Node>(Node{Kind::Implies, {}, l.node_, r.node_}));
}

void Formula::collect_atoms(std::set<std::string>& out) const {
  switch (kind()) {
    case Kind::Top:
      return;
    case Kind::Atom:
      out.insert(node_->atom);
      return;
    case Kind::Not:
      left().collect_atoms(out);
      return;
    default:
      left().collect_atoms(out);
      right().collect_atoms(out);
  }
}

bool Formula::eval(const std::map<std::string, bool>& valuation) const {
  switch (kind()) {
    case Kind::Top:
      return true;
    case Kind::Atom: {
      auto it = valuation.find(node_->atom);
      return it != valuation.end() && it->second;
    }
    case Kind::Not:
      return !left().eval(valuation);
    case Kind::And:
      return left().eval(valuation) && right().eval(valuation);
    case Kind::Or:
      return left().eval(valuation) || right().eval(valuation);
    case Kind::Implies:
      return !left().eval(valuation) || right().eval(valuation);
  }
  return false;
}

std::string Formula::to_string() const {
  switch (kind()) {
    case Kind::Top: return "top";
    case Kind::Atom: return node_->atom;
    case Kind::Not: return "-" + left().to_string();
    case Kind::And:
      return "(" + left().to_string() + " & " + right().to_string() + ")";
    case Kind::Or:
      return "(" + left().to_string() + " | " + right().to_string() + ")";
    case Kind::Implies:
      return "(" + left().to_string() + " -> " + right().to_string() + ")";
  }
  return "?";
}

std::vector<std::string> vocabulary(const std::vector<Formula>& fs) {
  std::set<std::string> atoms;
  for (const Formula& f : fs) f.collect_atoms(atoms);
  return {atoms.begin(), atoms.end()};
}

namespace {

struct PCursor {
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
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) advance();
  }
  [[noreturn]] void err(const std::string& m) const {
    throw ParseError(m, line, col);
  }
  bool lookahead(std::string_view s) const {
    return text.substr(pos, s.size()) == s;
  }
};

Formula parse_or(PCursor& cur);

Formula parse_primary(PCursor& cur) {
  cur.skip();
  if (cur.eof()) cur.err("unexpected end of formula");
  char c = cur.peek();
  if (c == '-') {
    cur.advance();
    if (!cur.eof() && cur.peek() == '>') cur.err("unexpected '->'");
    return Formula::lnot(parse_primary(cur));
  }
  if (c == '(') {
    cur.advance();
    Formula f = parse_or(cur);
    cur.skip();
    if (cur.eof() || cur.peek() != ')') cur.err("expected ')'");
    cur.advance();
    return f;
  }
  if (!std::isalpha(static_cast<unsigned char>(c))) cur.err("expected atom");
  std::string name;
  while (!cur.eof() && (std::isalnum(static_cast<unsigned char>(cur.peek())) ||
                        cur.peek() == '_')) {
    name.push_back(cur.peek());
    cur.advance();
  }
  if (name == "top") return Formula::top();
  return Formula::atom(name);
}

Formula parse_and(PCursor& cur) {
  Formula f = parse_primary(cur);
  for (;;) {
    cur.skip();
    if (!cur.eof() && cur.peek() == '&') {
      cur.advance();
      f = Formula::land(f, parse_primary(cur));
    } else {
      return f;
    }
  }
}

Formula parse_or(PCursor& cur) {
  Formula f = parse_and(cur);
  for (;;) {
    cur.skip();
    if (!cur.eof() && cur.peek() == '|') {
      cur.advance();
      f = Formula::lor(f, parse_and(cur));
    } else {
      return f;
    }
  }
}

Formula parse_implies(PCursor& cur) {
  Formula f = parse_or(cur);
  cur.skip();
  if (cur.lookahead("->")) {
    cur.advance();
    cur.advance();
    return Formula::implies(f, parse_implies(cur));
  }
  return f;
}

}  // namespace

Formula parse_formula(std::string_view text) {
  PCursor cur{text};
  Formula f = parse_implies(cur);
  cur.skip();
  if (!cur.eof()) cur.err("trailing input after formula");
  return f;
}

}  // namespace deonnet::prop
