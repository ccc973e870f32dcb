#include "deonnet/ansio.hpp"

#include <algorithm>

namespace deonnet::ansio {

std::string AnsElem::to_string() const {
  switch (kind) {
    case Kind::Top: return "top";
    case Kind::Pos: return base;
    case Kind::Neg: return "~" + base;
  }
  return "?";
}

Expected<AnsElem> anti(const Universe& u, const AnsElem& a) {
  if (a.kind == AnsElem::Kind::Top)
    return fail<AnsElem>(Errc::undefined_for_top,
                         "anti-element of top is undefined");
  if (!u.contains(a))
    return fail<AnsElem>(Errc::unknown_atom, a.base);
  return a.kind == AnsElem::Kind::Pos ? AnsElem::neg(a.base)
                                      : AnsElem::pos(a.base);
}

namespace {

std::set<AnsElem> norm_heads(const std::set<std::pair<AnsElem, AnsElem>>& n,
                             const std::set<AnsElem>& body_set) {
  std::set<AnsElem> out;
  for (const auto& [body, head] : n)
    if (body_set.count(body)) out.insert(head);
  return out;
}

std::set<AnsElem> close_under(const std::set<std::pair<AnsElem, AnsElem>>& n,
                              std::set<AnsElem> v) {
  for (;;) {
    std::set<AnsElem> heads = norm_heads(n, v);
    std::size_t before = v.size();
    v.insert(heads.begin(), heads.end());
    if (v.size() == before) return v;
  }
}

void intersect_into(std::optional<std::set<AnsElem>>& acc,
                    const std::set<AnsElem>& s) {
  if (!acc) {
    acc = s;
    return;
  }
  std::set<AnsElem> merged;
  std::set_intersection(acc->begin(), acc->end(), s.begin(), s.end(),
                        std::inserter(merged, merged.begin()));
  *acc = std::move(merged);
}

}  // namespace

Expected<std::set<AnsElem>> ans_output(const ANSystem& sys, const Context& a,
                                       int variant, bool throughput) {
  if (variant < 1 || variant > 4)
    return fail<std::set<AnsElem>>(Errc::invalid_code,
                                   "deontic operation variant must be 1..4");
  if (sys.universe.elements.size() > 16)
    return fail<std::set<AnsElem>>(Errc::universe_too_large,
                                   "universe limited to 16 base elements");

  std::set<std::pair<AnsElem, AnsElem>> norms = sys.norms;
  if (throughput) {
    norms.emplace(AnsElem::top(), AnsElem::top());
    for (const std::string& e : sys.universe.elements) {
      norms.emplace(AnsElem::pos(e), AnsElem::pos(e));
      norms.emplace(AnsElem::neg(e), AnsElem::neg(e));
    }
  }

  switch (variant) {
    case 1:
      return norm_heads(norms, a.elems);
    case 3: {
      std::set<AnsElem> b = a.elems;
      b = close_under(norms, std::move(b));
      return norm_heads(norms, b);
    }
    default: {
      // Variants 2 and 4 intersect over complete extensions of the context.
      // It suffices to consider, for each undecided element, exactly one of
      // e / ~e: N is monotone, so any larger complete superset yields a
      // larger N(V); for variant 4 each choice set is closed under N first.
      std::vector<std::string> undecided;
      for (const std::string& e : sys.universe.elements)
        if (!a.elems.count(AnsElem::pos(e)) && !a.elems.count(AnsElem::neg(e)))
          undecided.push_back(e);

      std::optional<std::set<AnsElem>> acc;
      const std::size_t combos = std::size_t{1} << undecided.size();
      for (std::size_t bits = 0; bits < combos; ++bits) {
        std::set<AnsElem> v = a.elems;
        for (std::size_t i = 0; i < undecided.size(); ++i)
          v.insert((bits >> i) & 1 ? AnsElem::pos(undecided[i])
                                   : AnsElem::neg(undecided[i]));
        if (variant == 4) v = close_under(norms, std::move(v));
        intersect_into(acc, norm_heads(norms, v));
      }
      return acc ? *acc : std::set<AnsElem>{};
    }
  }
}

Expected<std::set<AnsElem>> violations(const ANSystem& sys, const Context& a,
                                       int variant, bool throughput) {
  auto out = ans_output(sys, a, variant, throughput);
  if (!out.ok()) return out;
  std::set<AnsElem> v;
  for (const AnsElem& e : a.elems) {
    if (e.kind == AnsElem::Kind::Top) continue;
    auto bar = anti(sys.universe, e);
    if (bar.ok() && out.value().count(bar.value())) v.insert(e);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Propositional input/output logic

std::vector<std::string> IOGeneratorSet::vocab() const {
  std::set<std::string> atoms;
  for (const auto& [b, h] : gens) {
    b.collect_atoms(atoms);
    h.collect_atoms(atoms);
  }
  return {atoms.begin(), atoms.end()};
}

namespace {

struct TruthTable {
  std::vector<std::string> atoms;

  std::map<std::string, bool> valuation(std::size_t bits) const {
    std::map<std::string, bool> v;
    for (std::size_t i = 0; i < atoms.size(); ++i)
      v[atoms[i]] = (bits >> i) & 1;
    return v;
  }
  std::size_t rows() const { return std::size_t{1} << atoms.size(); }
};

Expected<TruthTable> make_table(std::set<std::string> atoms) {
  if (atoms.size() > 16)
    return fail<TruthTable>(Errc::vocabulary_too_large,
                            "truth tables limited to 16 atoms");
  TruthTable t;
  t.atoms.assign(atoms.begin(), atoms.end());
  return t;
}

bool all_hold(const std::vector<prop::Formula>& fs,
              const std::map<std::string, bool>& v) {
  return std::all_of(fs.begin(), fs.end(),
                     [&](const prop::Formula& f) { return f.eval(v); });
}

}  // namespace

Expected<bool> entails(const std::vector<prop::Formula>& assumptions,
                       const prop::Formula& phi) {
  std::set<std::string> atoms;
  for (const prop::Formula& f : assumptions) f.collect_atoms(atoms);
  phi.collect_atoms(atoms);
  auto table = make_table(std::move(atoms));
  if (!table.ok()) return Expected<bool>(table.error());

  for (std::size_t bits = 0; bits < table.value().rows(); ++bits) {
    auto v = table.value().valuation(bits);
    if (all_hold(assumptions, v) && !phi.eval(v)) return false;
  }
  return true;
}

Expected<IoQueryReport> io_query(const IOGeneratorSet& gens,
                                 const std::vector<prop::Formula>& a,
                                 const prop::Formula& phi, int variant) {
  if (variant < 1 || variant > 4)
    return fail<IoQueryReport>(Errc::invalid_code,
                               "output operation variant must be 1..4");
  std::set<std::string> atoms;
  for (const auto& [b, h] : gens.gens) {
    b.collect_atoms(atoms);
    h.collect_atoms(atoms);
  }
  for (const prop::Formula& f : a) f.collect_atoms(atoms);
  phi.collect_atoms(atoms);
  auto table = make_table(std::move(atoms));
  if (!table.ok()) return Expected<IoQueryReport>(table.error());

  IoQueryReport report;
  auto detach_names = [&](const std::vector<prop::Formula>& hs) {
    report.detached_heads.clear();
    for (const prop::Formula& h : hs)
      report.detached_heads.push_back(h.to_string());
  };

  switch (variant) {
    case 1: {
      // heads whose bodies follow from A, closed under consequence
      std::vector<prop::Formula> heads;
      for (const auto& [body, head] : gens.gens) {
        auto e = entails(a, body);
        if (!e.ok()) return Expected<IoQueryReport>(e.error());
        if (e.value()) heads.push_back(head);
      }
      detach_names(heads);
      auto m = entails(heads, phi);
      if (!m.ok()) return Expected<IoQueryReport>(m.error());
      report.member = m.value();
      return report;
    }
    case 3: {
      // least set of detachable heads, iterating deontic detachment
      std::vector<prop::Formula> detached;
      std::set<std::string> seen;
      for (;;) {
        std::vector<prop::Formula> premise = a;
        premise.insert(premise.end(), detached.begin(), detached.end());
        bool grew = false;
        for (const auto& [body, head] : gens.gens) {
          if (seen.count(head.to_string())) continue;
          auto e = entails(premise, body);
          if (!e.ok()) return Expected<IoQueryReport>(e.error());
          if (e.value()) {
            detached.push_back(head);
            seen.insert(head.to_string());
            grew = true;
          }
        }
        if (!grew) break;
      }
      detach_names(detached);
      auto m = entails(detached, phi);
      if (!m.ok()) return Expected<IoQueryReport>(m.error());
      report.member = m.value();
      return report;
    }
    default: {
      // Variants 2 and 4: intersect Cn(N(V)) over complete sets V. Each
      // valuation induces a maxiconsistent V; for variant 4 the valuation
      // must also satisfy every generator read as a material implication.
      bool any = false;
      for (std::size_t bits = 0; bits < table.value().rows(); ++bits) {
        auto v = table.value().valuation(bits);
        if (!all_hold(a, v)) continue;
        if (variant == 4) {
          bool closed = true;
          for (const auto& [body, head] : gens.gens)
            if (body.eval(v) && !head.eval(v)) {
              closed = false;
              break;
            }
          if (!closed) continue;
        }
        any = true;
        std::vector<prop::Formula> heads;
        for (const auto& [body, head] : gens.gens)
          if (body.eval(v)) heads.push_back(head);
        auto m = entails(heads, phi);
        if (!m.ok()) return Expected<IoQueryReport>(m.error());
        if (!m.value()) {
          report.member = false;
          report.countervaluation = v;
          detach_names(heads);
          return report;
        }
      }
      if (!any) {
        // no qualifying complete set except the whole language
        std::vector<prop::Formula> heads;
        for (const auto& [body, head] : gens.gens) heads.push_back(head);
        detach_names(heads);
        auto m = entails(heads, phi);
        if (!m.ok()) return Expected<IoQueryReport>(m.error());
        report.member = m.value();
        return report;
      }
      report.member = true;
      return report;
    }
  }
}

Expected<bool> io_member(const IOGeneratorSet& gens,
                         const std::vector<prop::Formula>& a,
                         const prop::Formula& phi, int variant) {
  auto r = io_query(gens, a, phi, variant);
  if (!r.ok()) return Expected<bool>(r.error());
  return r.value().member;
}

Expected<AnsElem> parse_ans_elem(std::string_view text) {
  std::size_t b = text.find_first_not_of(" \t");
  std::size_t e = text.find_last_not_of(" \t");
  if (b == std::string_view::npos)
    return fail<AnsElem>(Errc::invalid_code, "empty element");
  std::string_view s = text.substr(b, e - b + 1);
  bool neg = false;
  if (s.starts_with("-") || s.starts_with("~")) {
    neg = true;
    s.remove_prefix(1);
  }
  if (s == "top") {
    if (neg) return fail<AnsElem>(Errc::undefined_for_top, "-top");
    return AnsElem::top();
  }
  if (s.empty()) return fail<AnsElem>(Errc::invalid_code, "empty element");
  return neg ? AnsElem::neg(std::string(s)) : AnsElem::pos(std::string(s));
}

std::string print_elem_set(const std::set<AnsElem>& es) {
  std::string out = "{";
  bool first = true;
  for (const AnsElem& e : es) {
    if (!first) out += ", ";
    first = false;
    out += e.to_string();
  }
  return out + "}";
}

}  // namespace deonnet::ansio
