#pragma once

// Monte Carlo driver: sample many synthetic instances per sampling rate,
// cluster them, and compare the empirical full-recovery rate with the
// theoretical sampling rates.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "sparseclust/clustering.hpp"
#include "sparseclust/core_model.hpp"
#include "sparseclust/synth.hpp"

namespace sparseclust {

/// Invalid experiment configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  std::size_t n_items = 256;
  ShapeKind tree_shape = ShapeKind::balanced;
  std::size_t n_min = 16;
  /// Absolute sampling rates. When empty, the grid is p_multipliers times
  /// the theorem-1 rate, clamped to [0, 1].
  std::vector<double> p_grid;
  std::vector<double> p_multipliers;
  std::size_t trials = 100;
  double alpha = 0.05;
  double kappa = 3.0;
  std::uint64_t master_seed = 1;
  std::string output_path;
  double jitter = 0.5;
  /// Reuse one per-pair uniform across the whole p-grid, so each trial's
  /// observed edge set grows monotonically with p.
  bool common_random_numbers = true;
};

/// Throws ConfigError.
void validate(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);

/// 20 multipliers spaced geometrically from 0.25 to 1.5.
std::vector<double> default_multipliers();
std::vector<double> resolve_p_grid(const ExperimentConfig& config);

/// The p-independent part of a trial: ground truth and similarities.
struct TrialInstance {
  ClusterTree tree;
  SimilarityMatrix sim;
  std::uint64_t mask_seed;
};

TrialInstance make_trial_instance(const ExperimentConfig& config, std::size_t trial_index);
ObservationMask trial_mask(const ExperimentConfig& config, const TrialInstance& instance, double p);
/// Deterministic in (config, p, trial_index).
RecoveryReport run_trial(const ExperimentConfig& config, double p, std::size_t trial_index);

struct SweepRow {
  double p = 0.0;
  std::size_t trials = 0;
  std::size_t recovered = 0;
  double rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  double thm1_rate = 0.0;      // NaN when undefined for (N, n_min)
  double thm_asym_rate = 0.0;  // 2 kappa ln N / n_min, clamped
};

struct SweepResult {
  std::vector<SweepRow> rows;
  /// outcomes[row][trial]: whether that trial fully recovered.
  std::vector<std::vector<std::uint8_t>> outcomes;
};

/// Runs every (p, trial) pair on `threads` workers (0 = hardware
/// concurrency). Results are keyed by index, so output never depends on
/// scheduling. Writes the CSV to config.output_path when it is non-empty.
SweepResult sweep(const ExperimentConfig& config, unsigned threads = 0);

inline constexpr const char* kSweepCsvHeader =
    "p,trials,recovered,rate,ci_low,ci_high,thm1_rate,thm_asym_rate";
void write_sweep_csv(const SweepResult& result, std::ostream& out);
std::string sweep_csv(const SweepResult& result);

struct Interval {
  double low;
  double high;
};

/// Wilson score interval (z = 1.96 by default). A single trial yields [0, 1].
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

/// P(X <= k) for X ~ Binomial(n, p).
double binomial_cdf(std::size_t k, std::size_t n, double p);

struct ExampleCheck {
  std::string label;
  double measured;
  double target;
  double tolerance;  // absolute unless the label says relative
  bool pass;
};

struct PaperExample {
  std::string name;
  std::int64_t n_items = 0;
  double cluster_size = 0.0;
  double alpha = 0.0;
  double kappa = 0.0;
  double delta = 0.0;
  double beta = 0.0;
  double rate = 0.0;
  double expected_pairs = 0.0;
  double expected_entries = 0.0;
  std::int64_t min_n = 0;
  std::vector<ExampleCheck> checks{};
};

struct PaperReproduction {
  std::vector<PaperExample> examples;
  bool all_pass = false;
};

/// The two worked examples for the asymptotic rates: N = 1000 with clusters
/// of size >= 75 (kappa 3), and N = 1000 with clusters of size >= 100.
PaperReproduction reproduce_paper_examples();
nlohmann::json to_json(const PaperReproduction& r);

}  // namespace sparseclust
