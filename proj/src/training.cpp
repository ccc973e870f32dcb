#include "deonnet/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "deonnet/norms.hpp"
#include "deonnet/rng.hpp"

namespace deonnet::training {

namespace {

double act_deriv(double a, double beta) { return beta * (1 - a * a) / 2; }

bool mask_allows(const std::optional<TrainMask>& m, int kind, std::size_t i,
                 std::size_t j) {
  if (!m) return true;
  switch (kind) {
    case 0: return m->w_ih.empty() || m->w_ih[i][j] != 0;
    case 1: return m->w_ho.empty() || m->w_ho[i][j] != 0;
    case 2: return m->theta_h.empty() || m->theta_h[i] != 0;
    default: return m->theta_o.empty() || m->theta_o[i] != 0;
  }
}

Expected<void*> check_dims(const Network& net,
                           const std::vector<Example>& data) {
  for (const Example& ex : data) {
    if (ex.input.values.size() != net.input_labels.size() ||
        ex.target.values.size() != net.output_labels.size())
      return fail<void*>(Errc::dimension_mismatch,
                         "example does not match the network's label lists");
  }
  return static_cast<void*>(nullptr);
}

}  // namespace

Expected<double> example_error(const Network& net, const Example& ex) {
  auto fwd = neural::forward(net, ex.input);
  if (!fwd.ok()) return Expected<double>(fwd.error());
  double e = 0;
  for (std::size_t o = 0; o < ex.target.values.size(); ++o) {
    double d = fwd.value().raw.values[o] - ex.target.values[o];
    e += d * d;
  }
  return e;
}

Expected<Gradient> error_gradient(const Network& net, const Example& ex) {
  auto fwd = neural::forward(net, ex.input);
  if (!fwd.ok()) return Expected<Gradient>(fwd.error());
  const auto& f = fwd.value();
  if (ex.target.values.size() != net.output_labels.size())
    return fail<Gradient>(Errc::dimension_mismatch, "target length");

  const std::size_t n_hid = static_cast<std::size_t>(net.hidden_count);
  const std::size_t n_in = net.input_labels.size();
  const std::size_t n_out = net.output_labels.size();

  Gradient g;
  g.w_ih.assign(n_hid, std::vector<double>(n_in, 0.0));
  g.w_ho.assign(n_out, std::vector<double>(n_hid, 0.0));
  g.theta_h.assign(n_hid, 0.0);
  g.theta_o.assign(n_out, 0.0);

  std::vector<double> delta_o(n_out);
  for (std::size_t o = 0; o < n_out; ++o) {
    double a = f.raw.values[o];
    delta_o[o] = 2 * (a - ex.target.values[o]) * act_deriv(a, net.beta);
    for (std::size_t h = 0; h < n_hid; ++h)
      g.w_ho[o][h] = delta_o[o] * f.hidden_raw[h];
    g.theta_o[o] = -delta_o[o];
  }
  for (std::size_t h = 0; h < n_hid; ++h) {
    double back = 0;
    for (std::size_t o = 0; o < n_out; ++o)
      back += delta_o[o] * net.w_ho[o][h];
    double delta_h = back * act_deriv(f.hidden_raw[h], net.beta);
    for (std::size_t i = 0; i < n_in; ++i)
      g.w_ih[h][i] = delta_h * ex.input.values[i];
    g.theta_h[h] = -delta_h;
  }
  return g;
}

Expected<TrainResult> train(const Network& net,
                            const std::vector<Example>& data,
                            const TrainConfig& cfg) {
  if (cfg.eta <= 0 || cfg.eta >= 1)
    return fail<TrainResult>(Errc::invalid_code, "eta must be in (0,1)");
  if (cfg.momentum < 0 || cfg.momentum >= 1)
    return fail<TrainResult>(Errc::invalid_code, "momentum must be in [0,1)");
  auto dims = check_dims(net, data);
  if (!dims.ok()) return Expected<TrainResult>(dims.error());

  TrainResult result{net, {}};
  if (cfg.epochs == 0 || data.empty()) return result;
  Network& w = result.net;

  const std::size_t n_hid = static_cast<std::size_t>(net.hidden_count);
  const std::size_t n_in = net.input_labels.size();
  const std::size_t n_out = net.output_labels.size();

  Gradient vel;  // momentum buffers, one slot per parameter
  vel.w_ih.assign(n_hid, std::vector<double>(n_in, 0.0));
  vel.w_ho.assign(n_out, std::vector<double>(n_hid, 0.0));
  vel.theta_h.assign(n_hid, 0.0);
  vel.theta_o.assign(n_out, 0.0);

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_error = 0;
    for (std::size_t idx : order) {
      const Example& ex = data[idx];
      auto fwd = neural::forward(w, ex.input);
      if (!fwd.ok()) return Expected<TrainResult>(fwd.error());
      const auto& f = fwd.value();

      std::vector<double> delta_o(n_out);
      for (std::size_t o = 0; o < n_out; ++o) {
        double a = f.raw.values[o];
        double d = a - ex.target.values[o];
        epoch_error += d * d;
        delta_o[o] = 2 * d * act_deriv(a, w.beta);
      }
      std::vector<double> delta_h(n_hid);
      for (std::size_t h = 0; h < n_hid; ++h) {
        double back = 0;
        for (std::size_t o = 0; o < n_out; ++o)
          back += delta_o[o] * w.w_ho[o][h];
        delta_h[h] = back * act_deriv(f.hidden_raw[h], w.beta);
      }

      for (std::size_t o = 0; o < n_out; ++o) {
        for (std::size_t h = 0; h < n_hid; ++h) {
          if (!mask_allows(cfg.mask, 1, o, h)) continue;
          double step = -cfg.eta * (delta_o[o] * f.hidden_raw[h]) +
                        cfg.momentum * vel.w_ho[o][h];
          w.w_ho[o][h] += step;
          vel.w_ho[o][h] = step;
        }
        if (mask_allows(cfg.mask, 3, o, 0)) {
          double step = -cfg.eta * (-delta_o[o]) + cfg.momentum * vel.theta_o[o];
          w.theta_o[o] += step;
          vel.theta_o[o] = step;
        }
      }
      for (std::size_t h = 0; h < n_hid; ++h) {
        for (std::size_t i = 0; i < n_in; ++i) {
          if (!mask_allows(cfg.mask, 0, h, i)) continue;
          double step = -cfg.eta * (delta_h[h] * ex.input.values[i]) +
                        cfg.momentum * vel.w_ih[h][i];
          w.w_ih[h][i] += step;
          vel.w_ih[h][i] = step;
        }
        if (mask_allows(cfg.mask, 2, h, 0)) {
          double step = -cfg.eta * (-delta_h[h]) + cfg.momentum * vel.theta_h[h];
          w.theta_h[h] += step;
          vel.theta_h[h] = step;
        }
      }
    }
    result.history.push_back({epoch, epoch_error});
  }
  return result;
}

Metrics evaluate(const Network& net, const std::vector<Example>& data) {
  Metrics m;
  m.n = static_cast<int>(data.size());
  m.k = static_cast<int>(net.output_labels.size());
  if (data.empty() || m.k == 0) return m;

  int all_correct = 0;
  long correct = 0;
  for (const Example& ex : data) {
    auto fwd = neural::forward(net, ex.input);
    if (!fwd.ok()) continue;
    bool whole = true;
    for (std::size_t o = 0; o < ex.target.values.size(); ++o) {
      int want = static_cast<int>(ex.target.values[o]);
      int got = static_cast<int>(fwd.value().crisp.values[o]);
      if (want == got) ++correct;
      else whole = false;
    }
    if (whole) ++all_correct;
  }
  m.tot = static_cast<double>(all_correct) / m.n;
  m.part = static_cast<double>(correct) / (static_cast<double>(m.n) * m.k);
  return m;
}

Expected<CvResult> cross_validate(const std::function<Network()>& builder,
                                  const std::vector<Example>& data, int folds,
                                  const std::vector<std::uint64_t>& seeds,
                                  const TrainConfig& cfg) {
  if (folds < 2 || data.size() < static_cast<std::size_t>(folds))
    return fail<CvResult>(Errc::too_few_examples,
                          "need at least `folds` examples and folds >= 2");

  CvResult result;
  double tot_sum = 0, part_sum = 0;
  for (std::uint64_t seed : seeds) {
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);

    for (int fold = 0; fold < folds; ++fold) {
      std::vector<Example> train_set, test_set;
      for (std::size_t pos = 0; pos < order.size(); ++pos) {
        if (static_cast<int>(pos % static_cast<std::size_t>(folds)) == fold)
          test_set.push_back(data[order[pos]]);
        else
          train_set.push_back(data[order[pos]]);
      }
      TrainConfig fold_cfg = cfg;
      fold_cfg.seed = seed * 1315423911u + static_cast<std::uint64_t>(fold);
      auto trained = train(builder(), train_set, fold_cfg);
      if (!trained.ok()) return Expected<CvResult>(trained.error());
      Metrics m = evaluate(trained.value().net, test_set);
      tot_sum += m.tot;
      part_sum += m.part;
      result.folds.push_back({seed, fold, m});
    }
  }
  std::size_t runs = result.folds.size();
  result.mean.tot = tot_sum / static_cast<double>(runs);
  result.mean.part = part_sum / static_cast<double>(runs);
  result.mean.n = static_cast<int>(data.size());
  result.mean.k = result.folds.empty() ? 0 : result.folds[0].test.k;
  return result;
}

// ---------------------------------------------------------------------------
// Dataset generation

logic::Literal LabelSpace::input_literal(const std::string& label) const {
  bool primed = !label.empty() && label.back() == '\'';
  std::string base = primed ? label.substr(0, label.size() - 1) : label;
  return {namespaced ? norms::input_atom(base) : logic::Atom{base}, primed};
}

logic::Literal LabelSpace::output_literal(const std::string& label) const {
  bool primed = !label.empty() && label.back() == '\'';
  std::string base = primed ? label.substr(0, label.size() - 1) : label;
  return {namespaced ? norms::output_atom(base) : logic::Atom{base}, primed};
}

Expected<GeneratedData> generate_dataset(
    const logic::ExtendedProgram& program,
    const std::vector<std::string>& input_labels,
    const std::vector<std::string>& output_labels, const LabelSpace& space,
    const std::vector<std::set<logic::Literal>>& contexts) {
  GeneratedData out;
  for (const std::set<logic::Literal>& context : contexts) {
    logic::ExtendedProgram with_facts = program;
    for (const logic::Literal& l : context)
      with_facts.clauses.push_back({std::nullopt, l, {}});
    auto as = logic::answer_set(with_facts);
    if (!as.ok()) {
      if (as.error().code == Errc::inconsistent) {
        ++out.skipped_inconsistent;
        continue;
      }
      return Expected<GeneratedData>(as.error());
    }

    Example ex;
    for (const std::string& label : input_labels)
      ex.input.values.push_back(context.count(space.input_literal(label)) ? 1.0
                                                                          : -1.0);
    for (const std::string& label : output_labels)
      ex.target.values.push_back(
          as.value().contains(space.output_literal(label)) ? 1.0 : -1.0);
    out.examples.push_back(std::move(ex));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Files

std::string write_dataset(const std::vector<std::string>& input_labels,
                          const std::vector<std::string>& output_labels,
                          const std::vector<Example>& data) {
  std::string out;
  bool first = true;
  for (const std::string& l : input_labels) {
    if (!first) out += "\t";
    first = false;
    out += "in:" + l;
  }
  for (const std::string& l : output_labels) out += "\tout:" + l;
  out += "\n";
  for (const Example& ex : data) {
    first = true;
    for (double v : ex.input.values) {
      if (!first) out += "\t";
      first = false;
      out += std::to_string(static_cast<int>(v));
    }
    for (double v : ex.target.values)
      out += "\t" + std::to_string(static_cast<int>(v));
    out += "\n";
  }
  return out;
}

Expected<Dataset> read_dataset(std::string_view text) {
  Dataset ds;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line))
    return fail<Dataset>(Errc::invalid_code, "empty dataset");
  std::istringstream header(line);
  std::string cell;
  while (std::getline(header, cell, '\t')) {
    if (cell.rfind("in:", 0) == 0)
      ds.input_labels.push_back(cell.substr(3));
    else if (cell.rfind("out:", 0) == 0)
      ds.output_labels.push_back(cell.substr(4));
    else
      return fail<Dataset>(Errc::invalid_code, "bad header cell: " + cell);
  }
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    Example ex;
    std::size_t col = 0;
    while (std::getline(row, cell, '\t')) {
      int v;
      try {
        v = std::stoi(cell);
      } catch (...) {
        return fail<Dataset>(Errc::invalid_code,
                             "bad value at line " + std::to_string(line_no));
      }
      if (v < -1 || v > 1)
        return fail<Dataset>(Errc::invalid_code,
                             "value outside {-1,0,1} at line " +
                                 std::to_string(line_no));
      if (col < ds.input_labels.size())
        ex.input.values.push_back(v);
      else
        ex.target.values.push_back(v);
      ++col;
    }
    if (col != ds.input_labels.size() + ds.output_labels.size())
      return fail<Dataset>(Errc::invalid_code,
                           "row width at line " + std::to_string(line_no));
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

std::string history_csv(const std::vector<EpochStat>& history) {
  std::ostringstream out;
  out << "epoch,error\n";
  for (const EpochStat& s : history) out << s.epoch << "," << s.error << "\n";
  return out.str();
}

}  // namespace deonnet::training
