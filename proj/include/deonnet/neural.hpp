#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "deonnet/expected.hpp"
#include "deonnet/logic.hpp"
#include "deonnet/norms.hpp"

namespace deonnet::neural {

/// Single-hidden-layer feedforward network with bipolar semi-linear units
/// h(x) = 2/(1+e^(-beta x)) - 1. Activations above a_min count as true,
/// below -a_min as false, anything between as unknown.
struct Network {
  std::vector<std::string> input_labels;
  std::vector<std::string> output_labels;
  int hidden_count = 0;

  // w_ih[h][i], w_ho[o][h]
  std::vector<std::vector<double>> w_ih;
  std::vector<std::vector<double>> w_ho;
  std::vector<double> theta_h;
  std::vector<double> theta_o;
  double beta = 1.0;
  double a_min = 0.5;
  std::string provenance;

  // translation metadata (not serialized)
  std::vector<std::string> hidden_labels;
  std::vector<int> body_sizes;
  std::vector<int> head_multiplicity;

  int input_index(const std::string& label) const;
  int output_index(const std::string& label) const;
};

struct IOVector {
  std::vector<double> values;

  bool operator==(const IOVector&) const = default;
};

int crisp(double raw, double a_min);

/// Label of a classical literal: the atom name, primed when negated.
std::string literal_label(const logic::Literal& l);

struct TranslateOptions {
  double beta = 1.0;
  double a_min = 0.5;
};

/// One hidden neuron per clause; weights and thresholds chosen so that a
/// hidden neuron activates exactly when its clause body holds on a crisp
/// input, and an output activates exactly when one of its clauses fires.
/// Extra labels widen the layers with zero-weight, always-off columns.
Network cilp_translate(const logic::ExtendedProgram& p,
                       const TranslateOptions& opts = {},
                       const std::vector<std::string>& extra_inputs = {},
                       const std::vector<std::string>& extra_outputs = {});

/// Compile a normative code and translate the result. Input neurons carry
/// the (namespace-stripped) body literals, output neurons the rule heads;
/// no feedback is assumed between the two layers.
Expected<Network> ncilp_translate(
    const norms::NormativeCode& code, const TranslateOptions& opts = {},
    const norms::CompileOptions& copts = {},
    const std::vector<std::string>& extra_inputs = {},
    const std::vector<std::string>& extra_outputs = {});

struct ForwardResult {
  IOVector raw;
  IOVector crisp;
  std::vector<double> hidden_raw;
  std::vector<double> hidden_potential;
  std::vector<double> output_potential;
};

Expected<ForwardResult> forward(const Network& net, const IOVector& input);

/// Output-to-input wiring for recurrent runs. Inputs listed in
/// closed_world_inputs are driven to -1 after the first step; inputs fed by
/// neither stay clamped to their initial values.
struct FeedbackMap {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::set<std::string> closed_world_inputs;

  /// Same-label feedback: every input with a matching output is fed from
  /// it, every other input is closed-world.
  static FeedbackMap full(const Network& net);
};

/// Iterate the network, feeding crisp outputs back through the map, until
/// the crisp input vector repeats. Returns the stable crisp output.
Expected<IOVector> recurrent_run(const Network& net, const FeedbackMap& fb,
                                 const IOVector& initial, int max_iters = 200);

std::string to_json(const Network& net);
Expected<Network> network_from_json(std::string_view text);

/// Same shape as `like`, weights and thresholds uniform in [-range, range].
Network random_like(const Network& like, std::uint64_t seed,
                    double range = 0.3);

}  // namespace deonnet::neural
