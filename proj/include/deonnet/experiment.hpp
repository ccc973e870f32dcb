#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deonnet/expected.hpp"
#include "deonnet/norms.hpp"
#include "deonnet/training.hpp"

namespace deonnet::experiment {

/// Shared knobs for the robot-soccer studies. Seeds run sequentially and
/// every random draw derives from them, so reports reproduce bit for bit.
struct ExperimentConfig {
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  double eta = 0.1;
  double momentum = 0.5;
  int epochs = 150;
  double beta = 1.0;
  double a_min = 0.5;
  int contexts_per_rule = 25;   // sampled per rule and seed
  double extra_prob = 0.12;     // chance of adding an unrelated input fact
  std::string fixture_dir;      // empty: env DEONNET_FIXTURES or built-in
};

std::string fixture_dir_or_default(const std::string& requested);

struct RobocupFixture {
  norms::NormativeCode code;
  std::string path;
  std::string hash;
};

/// The 26-rule rule set with its 9 priorities.
Expected<RobocupFixture> load_robocup(const std::string& dir);

/// Rules whose numeric label suffix is at most n, with the priorities that
/// stay inside that prefix.
norms::NormativeCode rule_prefix(const norms::NormativeCode& code, int n);

struct BaselineRow {
  std::uint64_t seed = 0;
  training::Metrics kb;      // network initialized from the rule base
  training::Metrics random;  // same topology, random initialization
};

struct BaselineResult {
  std::vector<BaselineRow> rows;
  double kb_tot_mean = 0, kb_part_mean = 0;
  double random_tot_mean = 0, random_part_mean = 0;
  std::string fixture_hash;
  std::string to_json(const ExperimentConfig& cfg) const;
};

/// Networks built from R1-R20, trained on data derived from those rules,
/// tested on data derived from the held-out R21-R26.
Expected<BaselineResult> run_baseline(const ExperimentConfig& cfg);

struct IncrementalSizeRow {
  int rules = 0;
  bool train_set_metrics = false;  // no held-out rules remain
  std::vector<BaselineRow> rows;
  double kb_tot_mean = 0, kb_part_mean = 0;
  double random_tot_mean = 0, random_part_mean = 0;
};

struct IncrementalResult {
  std::vector<IncrementalSizeRow> sizes;  // 20, 22, 24, 26
  std::string fixture_hash;
  std::string to_json(const ExperimentConfig& cfg) const;
  std::string plot_csv() const;  // rules vs mean tot/part
};

Expected<IncrementalResult> run_incremental(const ExperimentConfig& cfg);

struct CtdGroupRow {
  std::uint64_t seed = 0;
  double accuracy = 0;     // group outputs correct on violation contexts
  double specificity = 0;  // secondary head produced only under violation
  int test_violations = 0;
  int test_regular = 0;
};

struct CtdGroup {
  std::string primary;    // rule whose priority guard was removed
  std::string secondary;  // rule handling the violation
  std::vector<CtdGroupRow> rows;
  double accuracy_mean = 0;
  double specificity_mean = 0;
};

struct CtdResult {
  std::vector<CtdGroup> groups;
  std::string fixture_hash;
  std::string to_json(const ExperimentConfig& cfg) const;
};

/// The three violation-handling pairs compiled without their priorities;
/// the network has to pick the orderings up from mixed training data.
Expected<CtdResult> run_ctd(const ExperimentConfig& cfg);

}  // namespace deonnet::experiment
