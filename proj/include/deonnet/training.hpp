#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "deonnet/expected.hpp"
#include "deonnet/neural.hpp"

namespace deonnet::training {

using neural::IOVector;
using neural::Network;

/// Crisp training pair aligned to a network's label lists.
struct Example {
  IOVector input;
  IOVector target;
};

/// Per-parameter trainability. Empty masks mean everything trains.
struct TrainMask {
  std::vector<std::vector<char>> w_ih, w_ho;
  std::vector<char> theta_h, theta_o;
};

struct TrainConfig {
  double eta = 0.1;       // learning rate, in (0,1)
  double momentum = 0.0;  // in [0,1)
  int epochs = 0;
  std::uint64_t seed = 0;
  std::optional<TrainMask> mask;
};

struct EpochStat {
  int epoch = 0;
  double error = 0;  // summed squared error over the epoch's examples
};

struct TrainResult {
  Network net;
  std::vector<EpochStat> history;
};

/// Per-example gradient descent on the summed squared error of the raw
/// outputs, with a momentum term; thresholds are trained as bias weights.
/// Example order is reshuffled each epoch from the seed.
Expected<TrainResult> train(const Network& net,
                            const std::vector<Example>& data,
                            const TrainConfig& cfg);

/// Analytic gradient of the squared error for one example, flattened as
/// (w_ih, w_ho, theta_h, theta_o). Exposed for the finite-difference checks.
struct Gradient {
  std::vector<std::vector<double>> w_ih, w_ho;
  std::vector<double> theta_h, theta_o;
};
Expected<Gradient> error_gradient(const Network& net, const Example& ex);
Expected<double> example_error(const Network& net, const Example& ex);

struct Metrics {
  double tot = 0;
  double part = 0;
  int n = 0;
  int k = 0;
};

/// Fraction of examples with every output correct (tot) and fraction of
/// individual outputs correct (part), after crisp discretization.
Metrics evaluate(const Network& net, const std::vector<Example>& data);

struct FoldDetail {
  std::uint64_t seed = 0;
  int fold = 0;
  Metrics test;
};

struct CvResult {
  Metrics mean;
  std::vector<FoldDetail> folds;
};

/// Systematic k-fold split per seed; every example is tested exactly once
/// per seed and never trained on in its own fold.
Expected<CvResult> cross_validate(const std::function<Network()>& builder,
                                  const std::vector<Example>& data, int folds,
                                  const std::vector<std::uint64_t>& seeds,
                                  const TrainConfig& cfg);

/// How dataset contexts and program atoms relate to network labels.
/// Compiled codes use the in_/out_ namespaces; plain programs use none.
struct LabelSpace {
  bool namespaced = false;
  logic::Literal input_literal(const std::string& label) const;
  logic::Literal output_literal(const std::string& label) const;
};

struct GeneratedData {
  std::vector<Example> examples;
  int skipped_inconsistent = 0;
};

/// One example per context: inputs are 1 on the context literals and -1
/// elsewhere; targets are the crisp encoding of the answer set of the
/// program plus the context facts, restricted to the output labels.
/// Contexts whose answer set is inconsistent are skipped and counted.
Expected<GeneratedData> generate_dataset(
    const logic::ExtendedProgram& program,
    const std::vector<std::string>& input_labels,
    const std::vector<std::string>& output_labels, const LabelSpace& space,
    const std::vector<std::set<logic::Literal>>& contexts);

// Delimited text: header of `in:`/`out:` labels, rows of -1/0/1.
std::string write_dataset(const std::vector<std::string>& input_labels,
                          const std::vector<std::string>& output_labels,
                          const std::vector<Example>& data);
struct Dataset {
  std::vector<std::string> input_labels;
  std::vector<std::string> output_labels;
  std::vector<Example> examples;
};
Expected<Dataset> read_dataset(std::string_view text);

/// Per-epoch training history as CSV.
std::string history_csv(const std::vector<EpochStat>& history);

}  // namespace deonnet::training
