#include "deonnet/neural.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "deonnet/rng.hpp"
#include "json.hpp"

namespace deonnet::neural {

int Network::input_index(const std::string& label) const {
  for (std::size_t i = 0; i < input_labels.size(); ++i)
    if (input_labels[i] == label) return static_cast<int>(i);
  return -1;
}

int Network::output_index(const std::string& label) const {
  for (std::size_t i = 0; i < output_labels.size(); ++i)
    if (output_labels[i] == label) return static_cast<int>(i);
  return -1;
}

int crisp(double raw, double a_min) {
  if (raw > a_min) return 1;
  if (raw < -a_min) return -1;
  return 0;
}

std::string literal_label(const logic::Literal& l) {
  return l.atom.name + (l.negated ? "'" : "");
}

namespace {

double activation(double x, double beta) {
  return 2.0 / (1.0 + std::exp(-beta * x)) - 1.0;
}

std::string display_label(const logic::Literal& l) {
  return norms::strip_namespace(l.atom) + (l.negated ? "'" : "");
}

using LabelFn = std::string (*)(const logic::Literal&);

Network build_network(const logic::ExtendedProgram& p, LabelFn label_of,
                      const TranslateOptions& opts,
                      const std::vector<std::string>& extra_inputs,
                      const std::vector<std::string>& extra_outputs,
                      std::string provenance) {
  Network net;
  net.beta = opts.beta;
  net.provenance = std::move(provenance);

  auto add_label = [](std::vector<std::string>& labels, const std::string& s) {
    if (std::find(labels.begin(), labels.end(), s) == labels.end())
      labels.push_back(s);
  };

  // Normalized clause bodies: one signed arc per distinct literal. A body
  // mentioning a literal both plainly and under naf can never fire; such a
  // neuron keeps no arcs and gets a blocking threshold below.
  struct BodyView {
    std::vector<std::pair<std::string, int>> arcs;  // label, +1 / -1
    bool contradictory = false;
  };
  std::vector<BodyView> bodies;
  for (const logic::Clause& c : p.clauses) {
    BodyView v;
    for (const logic::BodyLiteral& b : c.body) {
      std::string label = label_of(b.lit);
      int sign = b.naf ? -1 : 1;
      auto it = std::find_if(v.arcs.begin(), v.arcs.end(),
                             [&](const auto& a) { return a.first == label; });
      if (it == v.arcs.end())
        v.arcs.emplace_back(label, sign);
      else if (it->second != sign)
        v.contradictory = true;
    }
    if (v.contradictory) v.arcs.clear();
    bodies.push_back(std::move(v));
  }

  for (std::size_t ci = 0; ci < p.clauses.size(); ++ci) {
    for (const auto& [label, sign] : bodies[ci].arcs)
      add_label(net.input_labels, label);
    add_label(net.output_labels, label_of(p.clauses[ci].head));
  }
  for (const std::string& s : extra_inputs) add_label(net.input_labels, s);
  for (const std::string& s : extra_outputs) add_label(net.output_labels, s);

  net.hidden_count = static_cast<int>(p.clauses.size());
  const std::size_t n_in = net.input_labels.size();
  const std::size_t n_hid = p.clauses.size();
  const std::size_t n_out = net.output_labels.size();

  std::map<std::string, std::size_t> in_pos, out_pos;
  for (std::size_t i = 0; i < n_in; ++i) in_pos[net.input_labels[i]] = i;
  for (std::size_t o = 0; o < n_out; ++o) out_pos[net.output_labels[o]] = o;

  net.body_sizes.assign(n_hid, 0);
  net.head_multiplicity.assign(n_out, 0);
  for (std::size_t ci = 0; ci < p.clauses.size(); ++ci) {
    net.body_sizes[ci] = static_cast<int>(bodies[ci].arcs.size());
    if (!bodies[ci].contradictory)
      net.head_multiplicity[out_pos[label_of(p.clauses[ci].head)]] += 1;
    net.hidden_labels.push_back(
        p.clauses[ci].label.value_or("N" + std::to_string(ci + 1)));
  }

  // The shared weight magnitude must separate a fully satisfied clause body
  // from one with a single mismatched literal, and one active hidden neuron
  // from none. Both margins shrink as max(k, mu) grows, so a_min is raised
  // to max(requested, maxP/(maxP+1)), which keeps the margin term
  // g = a_min*(maxP+1) - (maxP-1) at least 1.
  int maxp = 1;
  for (int k : net.body_sizes) maxp = std::max(maxp, k);
  for (int m : net.head_multiplicity) maxp = std::max(maxp, m);
  double a_min = std::max(opts.a_min,
                          static_cast<double>(maxp) / (maxp + 1));
  net.a_min = a_min;
  double t = std::log((1 + a_min) / (1 - a_min)) / net.beta;
  double g = a_min * (maxp + 1) - (maxp - 1);
  double w = 1.25 * 2.0 * t / g;

  net.w_ih.assign(n_hid, std::vector<double>(n_in, 0.0));
  net.w_ho.assign(n_out, std::vector<double>(n_hid, 0.0));
  net.theta_h.assign(n_hid, 0.0);
  net.theta_o.assign(n_out, 0.0);

  for (std::size_t h = 0; h < p.clauses.size(); ++h) {
    if (bodies[h].contradictory) {
      // never fires: no arcs, threshold pinned above any reachable potential
      net.theta_h[h] = (1 + a_min) * w;
      continue;
    }
    for (const auto& [label, sign] : bodies[h].arcs)
      net.w_ih[h][in_pos[label]] = sign * w;
    net.theta_h[h] =
        (1 + a_min) * (static_cast<double>(bodies[h].arcs.size()) - 1) / 2 * w;
    net.w_ho[out_pos[label_of(p.clauses[h].head)]][h] = w;
  }
  for (std::size_t o = 0; o < n_out; ++o)
    net.theta_o[o] =
        (1 + a_min) * (1 - net.head_multiplicity[o]) / 2 * w;

  return net;
}

}  // namespace

Network cilp_translate(const logic::ExtendedProgram& p,
                       const TranslateOptions& opts,
                       const std::vector<std::string>& extra_inputs,
                       const std::vector<std::string>& extra_outputs) {
  return build_network(p, literal_label, opts, extra_inputs, extra_outputs,
                       "program:" + fnv1a_hex(logic::print_program(p)));
}

Expected<Network> ncilp_translate(const norms::NormativeCode& code,
                                  const TranslateOptions& opts,
                                  const norms::CompileOptions& copts,
                                  const std::vector<std::string>& extra_inputs,
                                  const std::vector<std::string>& extra_outputs) {
  auto program = norms::compile(code, copts);
  if (!program.ok()) return Expected<Network>(program.error());
  return build_network(
      program.value(), display_label, opts, extra_inputs, extra_outputs,
      "code:" + fnv1a_hex(norms::display_program(program.value())));
}

Expected<ForwardResult> forward(const Network& net, const IOVector& input) {
  if (input.values.size() != net.input_labels.size())
    return fail<ForwardResult>(
        Errc::dimension_mismatch,
        "input length " + std::to_string(input.values.size()) + ", expected " +
            std::to_string(net.input_labels.size()));

  ForwardResult r;
  const std::size_t n_hid = static_cast<std::size_t>(net.hidden_count);
  r.hidden_potential.resize(n_hid);
  r.hidden_raw.resize(n_hid);
  for (std::size_t h = 0; h < n_hid; ++h) {
    double u = -net.theta_h[h];
    const std::vector<double>& row = net.w_ih[h];
    for (std::size_t i = 0; i < row.size(); ++i)
      u += row[i] * input.values[i];
    r.hidden_potential[h] = u;
    r.hidden_raw[h] = activation(u, net.beta);
  }

  const std::size_t n_out = net.output_labels.size();
  r.output_potential.resize(n_out);
  r.raw.values.resize(n_out);
  r.crisp.values.resize(n_out);
  for (std::size_t o = 0; o < n_out; ++o) {
    double u = -net.theta_o[o];
    const std::vector<double>& row = net.w_ho[o];
    for (std::size_t h = 0; h < n_hid; ++h) u += row[h] * r.hidden_raw[h];
    r.output_potential[o] = u;
    r.raw.values[o] = activation(u, net.beta);
    r.crisp.values[o] = crisp(r.raw.values[o], net.a_min);
  }
  return r;
}

FeedbackMap FeedbackMap::full(const Network& net) {
  FeedbackMap fb;
  for (const std::string& in : net.input_labels) {
    if (net.output_index(in) >= 0)
      fb.pairs.emplace_back(in, in);
    else
      fb.closed_world_inputs.insert(in);
  }
  return fb;
}

Expected<IOVector> recurrent_run(const Network& net, const FeedbackMap& fb,
                                 const IOVector& initial, int max_iters) {
  if (initial.values.size() != net.input_labels.size())
    return fail<IOVector>(Errc::dimension_mismatch, "initial input length");

  std::vector<std::pair<int, int>> wires;  // (output idx, input idx)
  std::set<int> fed;
  for (const auto& [out_label, in_label] : fb.pairs) {
    int o = net.output_index(out_label);
    int i = net.input_index(in_label);
    if (o < 0) return fail<IOVector>(Errc::unknown_label, out_label);
    if (i < 0) return fail<IOVector>(Errc::unknown_label, in_label);
    if (!fed.insert(i).second)
      return fail<IOVector>(Errc::unknown_label,
                            "input fed twice: " + in_label);
    wires.emplace_back(o, i);
  }
  std::vector<int> cw;
  for (const std::string& label : fb.closed_world_inputs) {
    int i = net.input_index(label);
    if (i < 0) return fail<IOVector>(Errc::unknown_label, label);
    cw.push_back(i);
  }

  IOVector current = initial;
  std::map<std::vector<double>, int> seen;
  for (int iter = 0; iter < max_iters; ++iter) {
    auto step = forward(net, current);
    if (!step.ok()) return Expected<IOVector>(step.error());

    IOVector next = initial;  // unfed inputs stay clamped
    for (int i : cw) next.values[static_cast<std::size_t>(i)] = -1;
    for (const auto& [o, i] : wires)
      next.values[static_cast<std::size_t>(i)] =
          step.value().crisp.values[static_cast<std::size_t>(o)];

    if (next.values == current.values) return step.value().crisp;
    auto [at, fresh] = seen.emplace(current.values, iter);
    if (!fresh)
      return fail<IOVector>(
          Errc::non_convergence,
          "cycle of period " + std::to_string(iter - at->second) + " detected");
    current = std::move(next);
  }
  return fail<IOVector>(Errc::non_convergence,
                        "no stable state within " + std::to_string(max_iters) +
                            " iterations");
}

std::string to_json(const Network& net) {
  nlohmann::json j;
  j["input_labels"] = net.input_labels;
  j["output_labels"] = net.output_labels;
  j["w_ih"] = net.w_ih;
  j["w_ho"] = net.w_ho;
  j["theta_h"] = net.theta_h;
  j["theta_o"] = net.theta_o;
  j["beta"] = net.beta;
  j["a_min"] = net.a_min;
  j["provenance"] = net.provenance;
  return j.dump(2) + "\n";
}

Expected<Network> network_from_json(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded())
    return fail<Network>(Errc::invalid_code, "malformed network file");
  Network net;
  try {
    j.at("input_labels").get_to(net.input_labels);
    j.at("output_labels").get_to(net.output_labels);
    j.at("w_ih").get_to(net.w_ih);
    j.at("w_ho").get_to(net.w_ho);
    j.at("theta_h").get_to(net.theta_h);
    j.at("theta_o").get_to(net.theta_o);
    j.at("beta").get_to(net.beta);
    j.at("a_min").get_to(net.a_min);
    j.at("provenance").get_to(net.provenance);
  } catch (const nlohmann::json::exception& e) {
    return fail<Network>(Errc::invalid_code, e.what());
  }
  net.hidden_count = static_cast<int>(net.theta_h.size());
  for (const auto& row : net.w_ih)
    if (row.size() != net.input_labels.size())
      return fail<Network>(Errc::dimension_mismatch, "w_ih shape");
  if (net.w_ih.size() != net.theta_h.size() ||
      net.w_ho.size() != net.theta_o.size() ||
      net.w_ho.size() != net.output_labels.size())
    return fail<Network>(Errc::dimension_mismatch, "layer shapes");
  for (const auto& row : net.w_ho)
    if (row.size() != net.theta_h.size())
      return fail<Network>(Errc::dimension_mismatch, "w_ho shape");
  // derived metadata
  net.body_sizes.clear();
  for (const auto& row : net.w_ih)
    net.body_sizes.push_back(static_cast<int>(
        std::count_if(row.begin(), row.end(), [](double w) { return w != 0; })));
  net.head_multiplicity.clear();
  for (const auto& row : net.w_ho)
    net.head_multiplicity.push_back(static_cast<int>(
        std::count_if(row.begin(), row.end(), [](double w) { return w != 0; })));
  for (int h = 0; h < net.hidden_count; ++h)
    net.hidden_labels.push_back("N" + std::to_string(h + 1));
  return net;
}

Network random_like(const Network& like, std::uint64_t seed, double range) {
  Network net = like;
  net.provenance = "random:seed=" + std::to_string(seed);
  Rng rng(seed);
  for (auto& row : net.w_ih)
    for (double& w : row) w = rng.uniform(-range, range);
  for (auto& row : net.w_ho)
    for (double& w : row) w = rng.uniform(-range, range);
  for (double& t : net.theta_h) t = rng.uniform(-range, range);
  for (double& t : net.theta_o) t = rng.uniform(-range, range);
  return net;
}

}  // namespace deonnet::neural
