#include "deonnet/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "deonnet/ansio.hpp"
#include "deonnet/experiment.hpp"
#include "deonnet/kleene.hpp"
#include "deonnet/neural.hpp"
#include "deonnet/training.hpp"

namespace deonnet::cli {

namespace {

struct DomainError {
  Error error;
};

[[noreturn]] void bail(const Error& e) { throw DomainError{e}; }

template <typename T>
T need(Expected<T> r) {
  if (!r.ok()) bail(r.error());
  return std::move(r).value();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) bail({Errc::missing_fixture, path});
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out.good()) bail({Errc::missing_fixture, "cannot write " + path});
  out << text;
}

bool is_code_file(const std::string& path, bool forced) {
  return forced || path.ends_with(".dnet");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\n");
  return s.substr(b, e - b + 1);
}

logic::Literal parse_fact(const std::string& text) {
  std::string t = trim(text);
  bool neg = !t.empty() && t[0] == '-';
  if (neg) t = trim(t.substr(1));
  if (t.empty()) bail({Errc::invalid_code, "empty fact"});
  return {logic::Atom{t}, neg};
}

// Facts for a compiled code live in the input namespace.
std::set<logic::Literal> parse_context(const std::string& csv, bool namespaced) {
  std::set<logic::Literal> out;
  for (const std::string& part : split(csv, ',')) {
    if (trim(part).empty()) continue;
    logic::Literal l = parse_fact(part);
    if (namespaced) l.atom = norms::input_atom(l.atom.name);
    out.insert(l);
  }
  return out;
}

neural::Network load_network(const std::string& path) {
  return need(neural::network_from_json(slurp(path)));
}

// --- subcommand bodies -----------------------------------------------------

int cmd_compile(const std::string& file, std::ostream& out) {
  auto code = need(norms::parse_code(slurp(file)));
  auto program = need(norms::compile(code));
  out << norms::display_program(program);
  return 0;
}

int cmd_solve(const std::string& file, const std::string& facts_csv,
              bool as_code, std::ostream& out) {
  bool code_file = is_code_file(file, as_code);
  logic::ExtendedProgram program;
  if (code_file) {
    auto code = need(norms::parse_code(slurp(file)));
    program = need(norms::compile(code));
  } else {
    program = logic::parse_program(slurp(file));
  }
  for (const logic::Literal& l : parse_context(facts_csv, code_file))
    program.clauses.push_back({std::nullopt, l, {}});
  auto as = need(logic::answer_set(program));
  if (code_file) {
    logic::LiteralSet bare;
    for (const logic::Literal& l : as.members)
      bare.insert({logic::Atom{norms::strip_namespace(l.atom)}, l.negated});
    out << logic::print_literal_set(bare) << "\n";
  } else {
    out << logic::print_literal_set(as) << "\n";
  }
  return 0;
}

int cmd_translate(const std::string& file, const std::string& out_path,
                  double amin, double beta, bool as_code, std::ostream& out) {
  neural::TranslateOptions opts{beta, amin};
  neural::Network net;
  if (is_code_file(file, as_code)) {
    net = need(neural::ncilp_translate(need(norms::parse_code(slurp(file))), opts));
  } else {
    net = neural::cilp_translate(logic::parse_program(slurp(file)), opts);
  }
  std::string json = neural::to_json(net);
  if (out_path.empty())
    out << json;
  else
    spill(out_path, json);
  return 0;
}

neural::IOVector parse_input_vector(const neural::Network& net,
                                    const std::string& spec) {
  neural::IOVector v;
  v.values.assign(net.input_labels.size(), -1.0);
  for (const std::string& part : split(spec, ',')) {
    std::string t = trim(part);
    if (t.empty()) continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      bail({Errc::invalid_code, "expected label=value: " + t});
    std::string label = trim(t.substr(0, eq));
    int idx = net.input_index(label);
    if (idx < 0) bail({Errc::unknown_label, label});
    int val = std::atoi(t.c_str() + eq + 1);
    v.values[static_cast<std::size_t>(idx)] = val;
  }
  return v;
}

int cmd_run(const std::string& netfile, const std::string& input_spec,
            bool recurrent, int max_iters, std::ostream& out) {
  neural::Network net = load_network(netfile);
  neural::IOVector in = parse_input_vector(net, input_spec);
  if (recurrent) {
    auto stable =
        need(neural::recurrent_run(net, neural::FeedbackMap::full(net), in,
                                   max_iters));
    for (std::size_t o = 0; o < net.output_labels.size(); ++o)
      out << net.output_labels[o] << " = " << stable.values[o] << "\n";
  } else {
    auto r = need(neural::forward(net, in));
    for (std::size_t o = 0; o < net.output_labels.size(); ++o)
      out << net.output_labels[o] << " = " << r.crisp.values[o]
          << " (raw " << r.raw.values[o] << ")\n";
  }
  return 0;
}

std::vector<training::Example> align_dataset(const neural::Network& net,
                                             const training::Dataset& ds) {
  if (ds.input_labels != net.input_labels ||
      ds.output_labels != net.output_labels)
    bail({Errc::dimension_mismatch, "dataset labels do not match the network"});
  return ds.examples;
}

int cmd_train(const std::string& netfile, const std::string& datafile,
              const std::string& out_path, const std::string& history_path,
              const training::TrainConfig& cfg, int folds, std::ostream& out) {
  neural::Network net = load_network(netfile);
  auto ds = need(training::read_dataset(slurp(datafile)));
  if (folds >= 2) {
    auto cv = need(training::cross_validate([&] { return net; },
                                            align_dataset(net, ds), folds,
                                            {cfg.seed}, cfg));
    for (const training::FoldDetail& f : cv.folds)
      out << "fold " << f.fold << ": tot " << f.test.tot << "  part "
          << f.test.part << "\n";
    out << "mean: tot " << cv.mean.tot << "  part " << cv.mean.part << "\n";
    return 0;
  }
  auto trained = need(training::train(net, align_dataset(net, ds), cfg));
  std::string json = neural::to_json(trained.net);
  if (out_path.empty())
    out << json;
  else
    spill(out_path, json);
  if (!history_path.empty())
    spill(history_path, training::history_csv(trained.history));
  if (!trained.history.empty())
    out << "final epoch error: " << trained.history.back().error << "\n";
  return 0;
}

int cmd_eval(const std::string& netfile, const std::string& datafile,
             std::ostream& out) {
  neural::Network net = load_network(netfile);
  auto ds = need(training::read_dataset(slurp(datafile)));
  training::Metrics m = training::evaluate(net, align_dataset(net, ds));
  out << "tot = " << m.tot << "\npart = " << m.part << "\n";
  return 0;
}

ansio::IOGeneratorSet parse_generators(const std::string& text) {
  ansio::IOGeneratorSet gens;
  for (const std::string& pair : split(text, ';')) {
    std::string t = trim(pair);
    if (t.empty()) continue;
    if (t.front() != '(' || t.back() != ')')
      bail({Errc::invalid_code, "norm must look like (body, head): " + t});
    std::string inner = t.substr(1, t.size() - 2);
    // split on the top-level comma
    int depth = 0;
    std::size_t cut = std::string::npos;
    for (std::size_t i = 0; i < inner.size(); ++i) {
      if (inner[i] == '(') ++depth;
      if (inner[i] == ')') --depth;
      if (inner[i] == ',' && depth == 0) {
        cut = i;
        break;
      }
    }
    if (cut == std::string::npos)
      bail({Errc::invalid_code, "norm must contain a comma: " + t});
    gens.gens.emplace_back(prop::parse_formula(inner.substr(0, cut)),
                           prop::parse_formula(inner.substr(cut + 1)));
  }
  return gens;
}

int cmd_query_io(const std::string& norms_text, const std::string& context,
                 const std::string& phi_text, int variant, bool throughput,
                 bool ans_mode, const std::string& universe_csv,
                 bool want_violations, bool witness, std::ostream& out) {
  if (ans_mode) {
    ansio::ANSystem sys;
    for (const std::string& e : split(universe_csv, ','))
      if (!trim(e).empty()) sys.universe.elements.insert(trim(e));
    for (const std::string& pair : split(norms_text, ';')) {
      std::string t = trim(pair);
      if (t.empty()) continue;
      if (t.front() != '(' || t.back() != ')')
        bail({Errc::invalid_code, "norm must look like (body, head): " + t});
      auto parts = split(t.substr(1, t.size() - 2), ',');
      if (parts.size() != 2)
        bail({Errc::invalid_code, "norm must be a pair: " + t});
      sys.norms.emplace(need(ansio::parse_ans_elem(parts[0])),
                        need(ansio::parse_ans_elem(parts[1])));
    }
    std::set<ansio::AnsElem> ctx_elems;
    for (const std::string& e : split(context, ','))
      if (!trim(e).empty()) ctx_elems.insert(need(ansio::parse_ans_elem(e)));
    ansio::Context ctx(ctx_elems);
    auto output = need(ansio::ans_output(sys, ctx, variant, throughput));
    out << "output = " << ansio::print_elem_set(output) << "\n";
    if (want_violations) {
      auto v = need(ansio::violations(sys, ctx, variant, throughput));
      out << "violations = " << ansio::print_elem_set(v) << "\n";
    }
    return 0;
  }

  ansio::IOGeneratorSet gens = parse_generators(norms_text);
  std::vector<prop::Formula> a;
  for (const std::string& f : split(context, ','))
    if (!trim(f).empty()) a.push_back(prop::parse_formula(f));
  prop::Formula phi = prop::parse_formula(phi_text);
  auto report = need(ansio::io_query(gens, a, phi, variant));
  out << (report.member ? "member" : "not member") << "\n";
  if (witness) {
    out << "detached:";
    for (const std::string& h : report.detached_heads) out << " " << h;
    out << "\n";
    if (report.countervaluation) {
      out << "countervaluation:";
      for (const auto& [atom, value] : *report.countervaluation)
        out << " " << atom << "=" << (value ? "1" : "0");
      out << "\n";
    }
  }
  return 0;
}

int cmd_query_kleene(const std::string& file, const std::string& goal,
                     bool model, const std::string& facts_csv,
                     const std::string& unknown_csv, int depth, bool trace,
                     std::ostream& out) {
  kleene::KProgram program = kleene::parse_kprogram(slurp(file));
  std::set<logic::Atom> facts, unknown;
  for (const std::string& f : split(facts_csv, ','))
    if (!trim(f).empty()) facts.insert(logic::Atom{trim(f)});
  for (const std::string& f : split(unknown_csv, ','))
    if (!trim(f).empty()) unknown.insert(logic::Atom{trim(f)});

  if (model) {
    auto m = kleene::minimal_model(program, facts, unknown);
    for (const auto& [atom, v] : m.values())
      out << atom.name << " = " << logic::truth_to_int(v) << "\n";
    return 0;
  }
  if (goal.empty()) bail({Errc::invalid_code, "--goal or --model required"});
  auto outcome =
      kleene::sldnf_query(program.with_facts(facts), logic::Atom{goal}, depth);
  switch (outcome.result) {
    case kleene::QueryResult::Succeeds: out << "Succeeds\n"; break;
    case kleene::QueryResult::Fails: out << "Fails\n"; break;
    case kleene::QueryResult::DepthExceeded: out << "DepthExceeded\n"; break;
  }
  if (trace)
    for (const kleene::TraceStep& s : outcome.trace) out << s.render() << "\n";
  return 0;
}

int cmd_experiment(const std::string& kind,
                   const experiment::ExperimentConfig& cfg,
                   const std::string& out_path, const std::string& csv_path,
                   std::ostream& out) {
  std::string report;
  std::string csv;
  if (kind == "baseline") {
    auto r = need(experiment::run_baseline(cfg));
    report = r.to_json(cfg);
    out << "kb:     tot " << r.kb_tot_mean << "  part " << r.kb_part_mean
        << "\nrandom: tot " << r.random_tot_mean << "  part "
        << r.random_part_mean << "\n";
    out << "reference: kb tot 5.38% part 49.19%, random tot 5.13% part 45.25%\n";
  } else if (kind == "incremental") {
    auto r = need(experiment::run_incremental(cfg));
    report = r.to_json(cfg);
    csv = r.plot_csv();
    for (const auto& s : r.sizes)
      out << s.rules << " rules: tot " << s.kb_tot_mean << "  part "
          << s.kb_part_mean << (s.train_set_metrics ? "  (training set)" : "")
          << "\n";
    out << "reference peak at 26 rules: part 98.01% tot 91.18%\n";
  } else if (kind == "ctd") {
    auto r = need(experiment::run_ctd(cfg));
    report = r.to_json(cfg);
    for (const auto& g : r.groups)
      out << g.secondary << " over " << g.primary << ": accuracy "
          << g.accuracy_mean << "  specificity " << g.specificity_mean << "\n";
    out << "reference: 95%, 93%, 87%\n";
  } else {
    bail({Errc::invalid_code, "unknown experiment kind: " + kind});
  }
  if (!out_path.empty()) spill(out_path, report);
  if (!csv_path.empty() && !csv.empty()) spill(csv_path, csv);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"normative-code compiler and neural-symbolic toolkit"};
  app.require_subcommand(1);

  std::string file, facts, out_path, history_path, input_spec, data_file;
  std::string norms_text, context, phi_text, universe_csv, goal, unknown_csv;
  std::string csv_path, fixtures, seeds_csv = "1,2,3,4,5,6,7,8,9,10";
  bool as_code = false, recurrent = false, throughput = false;
  bool ans_mode = false, want_violations = false, witness = false;
  bool model = false, trace = false;
  int variant = 1, max_iters = 200, depth = 10000;
  double amin = 0.5, beta = 1.0, eta = 0.1, momentum = 0.5;
  int epochs = 150, contexts_per_rule = 25, folds = 0;
  double extra_prob = 0.12;
  std::uint64_t seed = 1;

  auto* c_compile = app.add_subcommand("compile", "compile a normative code");
  c_compile->add_option("file", file)->required();

  auto* c_solve = app.add_subcommand("solve", "answer set of a program");
  c_solve->add_option("file", file)->required();
  c_solve->add_option("--facts", facts, "comma list, -a for classical negation");
  c_solve->add_flag("--norm", as_code, "treat the file as a normative code");

  auto* c_translate = app.add_subcommand("translate", "build a network");
  c_translate->add_option("file", file)->required();
  c_translate->add_option("--out", out_path);
  c_translate->add_option("--amin", amin);
  c_translate->add_option("--beta", beta);
  c_translate->add_flag("--norm", as_code);

  auto* c_run = app.add_subcommand("run", "forward or recurrent run");
  c_run->add_option("network", file)->required();
  c_run->add_option("--input", input_spec, "label=value comma list");
  c_run->add_flag("--recurrent", recurrent);
  c_run->add_option("--max-iters", max_iters);

  auto* c_train = app.add_subcommand("train", "train a network on a dataset");
  c_train->add_option("network", file)->required();
  c_train->add_option("--data", data_file)->required();
  c_train->add_option("--out", out_path);
  c_train->add_option("--history", history_path);
  c_train->add_option("--eta", eta);
  c_train->add_option("--momentum", momentum);
  c_train->add_option("--epochs", epochs);
  c_train->add_option("--seed", seed);
  c_train->add_option("--folds", folds, "cross-validate instead of training");

  auto* c_eval = app.add_subcommand("eval", "tot/part metrics on a dataset");
  c_eval->add_option("network", file)->required();
  c_eval->add_option("--data", data_file)->required();

  auto* c_qio = app.add_subcommand("query-io", "input/output logic queries");
  c_qio->add_option("--norms", norms_text)->required();
  c_qio->add_option("--context", context);
  c_qio->add_option("--phi", phi_text);
  c_qio->add_option("--variant", variant)->check(CLI::Range(1, 4));
  c_qio->add_flag("--throughput", throughput);
  c_qio->add_flag("--ans", ans_mode, "abstract normative system mode");
  c_qio->add_option("--universe", universe_csv);
  c_qio->add_flag("--violations", want_violations);
  c_qio->add_flag("--witness", witness);

  auto* c_qk = app.add_subcommand("query-kleene", "three-valued queries");
  c_qk->add_option("file", file)->required();
  c_qk->add_option("--goal", goal);
  c_qk->add_flag("--model", model, "print the minimal model");
  c_qk->add_option("--facts", facts);
  c_qk->add_option("--unknown", unknown_csv);
  c_qk->add_option("--depth", depth);
  c_qk->add_flag("--trace", trace);

  auto* c_exp = app.add_subcommand("experiment", "robot-soccer studies");
  std::string kind;
  c_exp->add_option("kind", kind)->required()->check(
      CLI::IsMember({"baseline", "incremental", "ctd"}));
  c_exp->add_option("--seeds", seeds_csv);
  c_exp->add_option("--eta", eta);
  c_exp->add_option("--momentum", momentum);
  c_exp->add_option("--epochs", epochs);
  c_exp->add_option("--amin", amin);
  c_exp->add_option("--beta", beta);
  c_exp->add_option("--contexts-per-rule", contexts_per_rule);
  c_exp->add_option("--extra-prob", extra_prob);
  c_exp->add_option("--out", out_path);
  c_exp->add_option("--csv", csv_path);
  c_exp->add_option("--fixtures", fixtures);

  std::vector<std::string> argv = args;
  std::reverse(argv.begin(), argv.end());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*c_compile) return cmd_compile(file, out);
    if (*c_solve) return cmd_solve(file, facts, as_code, out);
    if (*c_translate)
      return cmd_translate(file, out_path, amin, beta, as_code, out);
    if (*c_run) return cmd_run(file, input_spec, recurrent, max_iters, out);
    if (*c_train) {
      training::TrainConfig cfg;
      cfg.eta = eta;
      cfg.momentum = momentum;
      cfg.epochs = epochs;
      cfg.seed = seed;
      return cmd_train(file, data_file, out_path, history_path, cfg, folds,
                       out);
    }
    if (*c_eval) return cmd_eval(file, data_file, out);
    if (*c_qio)
      return cmd_query_io(norms_text, context, phi_text, variant, throughput,
                          ans_mode, universe_csv, want_violations, witness,
                          out);
    if (*c_qk)
      return cmd_query_kleene(file, goal, model, facts, unknown_csv, depth,
                              trace, out);
    if (*c_exp) {
      experiment::ExperimentConfig cfg;
      cfg.seeds.clear();
      for (const std::string& s : split(seeds_csv, ','))
        if (!trim(s).empty())
          cfg.seeds.push_back(std::strtoull(trim(s).c_str(), nullptr, 10));
      cfg.eta = eta;
      cfg.momentum = momentum;
      cfg.epochs = epochs;
      cfg.beta = beta;
      cfg.a_min = amin;
      cfg.contexts_per_rule = contexts_per_rule;
      cfg.extra_prob = extra_prob;
      cfg.fixture_dir = fixtures;
      return cmd_experiment(kind, cfg, out_path, csv_path, out);
    }
  } catch (const ParseError& e) {
    err << "parse error at line " << e.line << ", col " << e.col << ": "
        << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << errc_name(e.error.code)
        << (e.error.detail.empty() ? "" : ": " + e.error.detail) << "\n";
    return 1;
  }
  return 0;
}

}  // namespace deonnet::cli
