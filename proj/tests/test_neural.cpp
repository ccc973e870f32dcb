#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "deonnet/neural.hpp"
#include "support/gen.hpp"

using namespace deonnet;
using namespace deonnet::neural;

namespace {

logic::ExtendedProgram example1() {
  return logic::parse_program("a <- b, c, not d.\na <- e, f.\nb.\n");
}

std::string fixture(const std::string& name) {
  std::ifstream in(std::string(DEONNET_FIXTURE_DIR) + "/" + name);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

logic::Literal label_to_literal(const std::string& label) {
  if (!label.empty() && label.back() == '\'')
    return {logic::Atom{label.substr(0, label.size() - 1)}, true};
  return {logic::Atom{label}, false};
}

IOVector input_for(const Network& net, std::initializer_list<const char*> on) {
  IOVector v;
  v.values.assign(net.input_labels.size(), -1.0);
  for (const char* label : on) {
    int i = net.input_index(label);
    REQUIRE(i >= 0);
    v.values[static_cast<std::size_t>(i)] = 1.0;
  }
  return v;
}

int out_of(const Network& net, const ForwardResult& r, const char* label) {
  int o = net.output_index(label);
  REQUIRE(o >= 0);
  return static_cast<int>(r.crisp.values[static_cast<std::size_t>(o)]);
}

}  // namespace

TEST_CASE("cilp translation reproduces the three-clause network") {
  Network net = cilp_translate(example1());
  CHECK(net.input_labels == std::vector<std::string>{"b", "c", "d", "e", "f"});
  CHECK(net.output_labels == std::vector<std::string>{"a", "b"});
  CHECK(net.hidden_count == 3);

  // first hidden neuron: positive arcs from b and c, negative from d
  std::size_t ib = 0, ic = 1, id = 2;
  CHECK(net.w_ih[0][ib] > 0);
  CHECK(net.w_ih[0][ic] > 0);
  CHECK(net.w_ih[0][id] < 0);
  CHECK(net.w_ih[0][3] == 0);
  // fact clause: no incoming arcs, negative threshold keeps it active
  CHECK(net.body_sizes[2] == 0);
  CHECK(net.theta_h[2] < 0);
}

TEST_CASE("forward computes the clause semantics on crisp inputs") {
  Network net = cilp_translate(example1());

  auto r1 = forward(net, input_for(net, {"b", "c"})).value();
  CHECK(out_of(net, r1, "a") == 1);
  CHECK(out_of(net, r1, "b") == 1);

  auto r2 = forward(net, input_for(net, {})).value();
  CHECK(out_of(net, r2, "a") == -1);
  CHECK(out_of(net, r2, "b") == 1);  // fact

  auto r3 = forward(net, input_for(net, {"b", "c", "d"})).value();
  CHECK(out_of(net, r3, "a") == -1);
}

TEST_CASE("a network without hidden neurons keeps outputs off") {
  Network net = cilp_translate(logic::ExtendedProgram{}, {}, {"x"}, {"y"});
  IOVector in;
  in.values = {1.0};
  auto r = forward(net, in).value();
  REQUIRE(r.crisp.values.size() == 1);
  CHECK(r.crisp.values[0] == -1);
}

TEST_CASE("forward rejects mismatched input lengths") {
  Network net = cilp_translate(example1());
  IOVector in;
  in.values = {1.0, 1.0};
  auto r = forward(net, in);
  REQUIRE(!r.ok());
  CHECK(r.error().code == Errc::dimension_mismatch);
}

TEST_CASE("recurrent run converges to the unique stable state") {
  Network net = cilp_translate(example1());
  FeedbackMap fb = FeedbackMap::full(net);
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    IOVector init;
    for (std::size_t i = 0; i < net.input_labels.size(); ++i)
      init.values.push_back(rng.chance(0.5) ? 1.0 : -1.0);
    auto stable = recurrent_run(net, fb, init).value();
    CHECK(stable.values[static_cast<std::size_t>(net.output_index("b"))] == 1);
    CHECK(stable.values[static_cast<std::size_t>(net.output_index("a"))] == -1);
  }
}

TEST_CASE("empty feedback stabilizes immediately") {
  Network net = cilp_translate(example1());
  IOVector init = input_for(net, {"b", "c"});
  auto stable = recurrent_run(net, FeedbackMap{}, init).value();
  CHECK(stable.values[static_cast<std::size_t>(net.output_index("a"))] == 1);
}

TEST_CASE("an odd feedback loop is reported as a cycle") {
  logic::ExtendedProgram p = logic::parse_program("p <- not q.\nq <- not p.\n");
  Network net = cilp_translate(p);
  FeedbackMap fb = FeedbackMap::full(net);
  IOVector init;
  init.values.assign(net.input_labels.size(), 1.0);
  auto r = recurrent_run(net, fb, init);
  REQUIRE(!r.ok());
  CHECK(r.error().code == Errc::non_convergence);
  CHECK(r.error().detail.find("period 2") != std::string::npos);
}

TEST_CASE("translated networks compute tp_step on every crisp input") {
  Rng rng(1234);
  int programs = 0;
  while (programs < 100) {
    logic::ExtendedProgram p = testgen::random_program(rng);
    Network net = cilp_translate(p);
    if (net.input_labels.size() > 12) continue;
    ++programs;

    const std::size_t n = net.input_labels.size();
    for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
      IOVector in;
      logic::LiteralSet current;
      for (std::size_t i = 0; i < n; ++i) {
        bool on = (bits >> i) & 1;
        in.values.push_back(on ? 1.0 : -1.0);
        if (on) current.insert(label_to_literal(net.input_labels[i]));
      }
      logic::LiteralSet expected = logic::tp_step(p, current);
      auto r = forward(net, in).value();
      for (std::size_t o = 0; o < net.output_labels.size(); ++o) {
        bool derived = expected.contains(label_to_literal(net.output_labels[o]));
        CHECK(r.crisp.values[o] == (derived ? 1 : -1));
      }
    }
  }
}

TEST_CASE("recurrent fixpoint equals the answer set on acyclic programs") {
  Rng rng(4321);
  testgen::ProgramOptions opt;
  opt.strict_acyclic = true;
  for (int round = 0; round < 100; ++round) {
    logic::ExtendedProgram p = testgen::random_program(rng, opt);
    auto as = logic::answer_set(p);
    REQUIRE(as.ok());
    Network net = cilp_translate(p);
    FeedbackMap fb = FeedbackMap::full(net);
    for (int trial = 0; trial < 3; ++trial) {
      IOVector init;
      for (std::size_t i = 0; i < net.input_labels.size(); ++i)
        init.values.push_back(rng.chance(0.5) ? 1.0 : -1.0);
      auto stable = recurrent_run(net, fb, init).value();
      for (std::size_t o = 0; o < net.output_labels.size(); ++o) {
        bool derived =
            as.value().contains(label_to_literal(net.output_labels[o]));
        CHECK(stable.values[o] == (derived ? 1 : -1));
      }
    }
  }
}

TEST_CASE("activation margins separate firing from non-firing patterns") {
  Rng rng(555);
  for (int round = 0; round < 50; ++round) {
    logic::ExtendedProgram p = testgen::random_program(rng);
    Network net = cilp_translate(p);
    auto h = [&](double x) { return 2.0 / (1.0 + std::exp(-net.beta * x)) - 1.0; };
    for (int hid = 0; hid < net.hidden_count; ++hid) {
      std::size_t hh = static_cast<std::size_t>(hid);
      double sum = 0, min_w = 0;
      int k = 0;
      for (double w : net.w_ih[hh]) {
        if (w == 0) continue;
        sum += std::abs(w);
        min_w = (k == 0) ? std::abs(w) : std::min(min_w, std::abs(w));
        ++k;
      }
      if (k == 0) continue;  // facts always fire
      double fire = h(sum - net.theta_h[hh]);
      double near = h(sum - 2 * min_w - net.theta_h[hh]);
      CHECK(fire - near > 2 * net.a_min);
    }
  }
}

TEST_CASE("translation is deterministic") {
  logic::ExtendedProgram p = example1();
  CHECK(to_json(cilp_translate(p)) == to_json(cilp_translate(p)));
}

TEST_CASE("network json round-trips bit-exactly") {
  Network net = cilp_translate(example1());
  std::string j = to_json(net);
  Network back = network_from_json(j).value();
  CHECK(to_json(back) == j);
  CHECK(back.w_ih == net.w_ih);
  CHECK(back.w_ho == net.w_ho);
  CHECK(back.theta_h == net.theta_h);
  CHECK(back.theta_o == net.theta_o);
  CHECK(back.beta == net.beta);
  CHECK(back.a_min == net.a_min);

  CHECK(!network_from_json("{not json").ok());
}

TEST_CASE("ncilp on the three robocup rules: 7 inputs, 3 hidden, 1 output") {
  auto code = norms::parse_code(fixture("robocup3.dnet")).value();
  Network net = ncilp_translate(code).value();
  CHECK(net.input_labels.size() == 7);
  CHECK(net.hidden_count == 3);
  REQUIRE(net.output_labels.size() == 1);
  CHECK(net.output_labels[0] == "impactingOpponent");

  auto r = forward(net, input_for(net, {"opponentShooting", "closeToOpponent"}))
               .value();
  CHECK(r.crisp.values[0] == 1);
  auto r2 = forward(net, input_for(net, {"opponentShooting"})).value();
  CHECK(r2.crisp.values[0] == -1);
}

TEST_CASE("ncilp wires priorities as negative arcs") {
  auto code = norms::parse_code(fixture("worked_example.dnet")).value();
  Network net = ncilp_translate(code).value();
  CHECK(net.input_labels ==
        std::vector<std::string>{"a", "b", "d", "e", "g"});
  CHECK(net.hidden_count == 3);
  CHECK(net.output_labels == std::vector<std::string>{"c", "f"});

  // r2's hidden neuron: positive from d,e; negative from a,b,g
  std::size_t r2 = 2;
  CHECK(net.w_ih[r2][net.input_index("d")] > 0);
  CHECK(net.w_ih[r2][net.input_index("e")] > 0);
  CHECK(net.w_ih[r2][net.input_index("a")] < 0);
  CHECK(net.w_ih[r2][net.input_index("b")] < 0);
  CHECK(net.w_ih[r2][net.input_index("g")] < 0);

  // outputs are not fed from inputs: the layers are disjoint namespaces
  auto r = forward(net, input_for(net, {"d", "e"})).value();
  CHECK(out_of(net, r, "f") == 1);
  CHECK(out_of(net, r, "c") == -1);
  auto blocked = forward(net, input_for(net, {"d", "e", "g"})).value();
  CHECK(out_of(net, blocked, "f") == -1);
}

TEST_CASE("a permission-only code yields a network with no hidden neurons") {
  auto code = norms::parse_code("perm P1: (a, P(b)).").value();
  Network net = ncilp_translate(code).value();
  CHECK(net.hidden_count == 0);
  CHECK(net.output_labels.empty());
}

TEST_CASE("extra labels pad the layers with always-off columns") {
  auto code = norms::parse_code(fixture("robocup3.dnet")).value();
  Network net = ncilp_translate(code, {}, {}, {"newInput"}, {"newOutput"}).value();
  CHECK(net.input_index("newInput") >= 0);
  int o = net.output_index("newOutput");
  REQUIRE(o >= 0);
  IOVector in;
  in.values.assign(net.input_labels.size(), 1.0);
  auto r = forward(net, in).value();
  CHECK(r.crisp.values[static_cast<std::size_t>(o)] == -1);
}

TEST_CASE("random_like keeps the topology but not the weights") {
  Network net = cilp_translate(example1());
  Network rnd = random_like(net, 7);
  CHECK(rnd.input_labels == net.input_labels);
  CHECK(rnd.output_labels == net.output_labels);
  CHECK(rnd.hidden_count == net.hidden_count);
  CHECK(rnd.a_min == net.a_min);
  CHECK(rnd.w_ih != net.w_ih);
  // deterministic in the seed
  CHECK(to_json(random_like(net, 7)) == to_json(rnd));
}
