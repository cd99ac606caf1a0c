#include "sparseclust/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "sparseclust/bounds.hpp"
#include "sparseclust/io.hpp"
#include "sparseclust/rng.hpp"
#include "sparseclust/sampling.hpp"

namespace sparseclust {

using nlohmann::json;

namespace {

enum Stream : std::uint64_t { kTrial = 11, kTree = 1, kSim = 2, kMask = 3 };

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid config: " + what);
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double theorem1_or_nan(const ExperimentConfig& c) {
  const auto N = static_cast<std::int64_t>(c.n_items);
  const auto n = static_cast<std::int64_t>(c.n_min);
  if (N < 4 || n < 4 || n >= N || !(c.alpha > 0.0 && c.alpha < 1.0))
    return std::numeric_limits<double>::quiet_NaN();
  return bounds::theorem1_rate(N, n, c.alpha).value;
}

double asymptotic_or_nan(const ExperimentConfig& c) {
  if (c.n_items < 2 || c.kappa < bounds::kMinOversampling || c.n_min < 1)
    return std::numeric_limits<double>::quiet_NaN();
  return bounds::theorem2_rate_for_cluster_size(static_cast<std::int64_t>(c.n_items),
                                                static_cast<double>(c.n_min), c.kappa)
      .rate.value;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void validate(const ExperimentConfig& c) {
  require(c.n_items >= 2, "n_items must be >= 2");
  require(c.tree_shape != ShapeKind::balanced || std::has_single_bit(c.n_items),
          "balanced tree_shape needs a power-of-two n_items");
  require(c.n_min >= 1 && c.n_min <= c.n_items, "n_min must lie in [1, n_items]");
  require(c.trials >= 1, "trials must be >= 1");
  require(c.alpha > 0.0 && c.alpha < 1.0, "alpha must lie in (0, 1)");
  require(c.kappa > 0.0, "kappa must be > 0");
  require(c.jitter >= 0.0 && c.jitter < 1.0, "jitter must lie in [0, 1)");
  for (double p : c.p_grid) require(p >= 0.0 && p <= 1.0, "p_grid values must lie in [0, 1]");
  for (double m : c.p_multipliers) require(m >= 0.0 && std::isfinite(m), "p_multipliers must be >= 0");
}

ExperimentConfig config_from_json(const json& j) {
  static const std::set<std::string> known{
      "n_items", "tree_shape", "n_min",      "p_grid", "p_multipliers",        "trials",
      "alpha",   "kappa",      "master_seed", "output_path", "jitter", "common_random_numbers"};
  if (!j.is_object()) throw ConfigError("invalid config: expected a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ConfigError("invalid config: unknown field '" + key + "'");

  ExperimentConfig c;
  try {
    if (j.contains("n_items")) c.n_items = j.at("n_items").get<std::size_t>();
    if (j.contains("tree_shape")) c.tree_shape = parse_shape(j.at("tree_shape").get<std::string>());
    if (j.contains("n_min")) c.n_min = j.at("n_min").get<std::size_t>();
    if (j.contains("p_grid")) c.p_grid = j.at("p_grid").get<std::vector<double>>();
    if (j.contains("p_multipliers")) c.p_multipliers = j.at("p_multipliers").get<std::vector<double>>();
    if (j.contains("trials")) c.trials = j.at("trials").get<std::size_t>();
    if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
    if (j.contains("kappa")) c.kappa = j.at("kappa").get<double>();
    if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("output_path")) c.output_path = j.at("output_path").get<std::string>();
    if (j.contains("jitter")) c.jitter = j.at("jitter").get<double>();
    if (j.contains("common_random_numbers"))
      c.common_random_numbers = j.at("common_random_numbers").get<bool>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  validate(c);
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  return json{{"n_items", c.n_items},
              {"tree_shape", std::string(to_string(c.tree_shape))},
              {"n_min", c.n_min},
              {"p_grid", c.p_grid},
              {"p_multipliers", c.p_multipliers},
              {"trials", c.trials},
              {"alpha", c.alpha},
              {"kappa", c.kappa},
              {"master_seed", c.master_seed},
              {"output_path", c.output_path},
              {"jitter", c.jitter},
              {"common_random_numbers", c.common_random_numbers}};
}

std::vector<double> default_multipliers() {
  constexpr int kPoints = 20;
  constexpr double kLow = 0.25, kHigh = 1.5;
  std::vector<double> out(kPoints);
  for (int k = 0; k < kPoints; ++k)
    out[k] = kLow * std::pow(kHigh / kLow, static_cast<double>(k) / (kPoints - 1));
  return out;
}

std::vector<double> resolve_p_grid(const ExperimentConfig& c) {
  if (!c.p_grid.empty()) return c.p_grid;
  const double base = theorem1_or_nan(c);
  if (std::isnan(base))
    throw ConfigError(
        "invalid config: p_grid is required when the theorem-1 rate is undefined "
        "(needs 4 <= n_min < n_items)");
  const auto multipliers = c.p_multipliers.empty() ? default_multipliers() : c.p_multipliers;
  std::vector<double> grid;
  grid.reserve(multipliers.size());
  for (double m : multipliers) grid.push_back(std::clamp(m * base, 0.0, 1.0));
  return grid;
}

// ---------------------------------------------------------------------------
// Trials

TrialInstance make_trial_instance(const ExperimentConfig& c, std::size_t trial_index) {
  const std::uint64_t seed = rng::hash(c.master_seed, kTrial, trial_index);
  ClusterTree tree = generate_tree(TreeShape{c.tree_shape, c.n_items, rng::hash(seed, kTree)});
  SimilarityMatrix sim = generate_tc_similarities(tree, rng::hash(seed, kSim), c.jitter);
  return TrialInstance{std::move(tree), std::move(sim), rng::hash(seed, kMask)};
}

ObservationMask trial_mask(const ExperimentConfig& c, const TrialInstance& instance, double p) {
  const std::uint64_t seed = c.common_random_numbers
                                 ? instance.mask_seed
                                 : rng::hash(instance.mask_seed, std::bit_cast<std::uint64_t>(p));
  return sample_mask(c.n_items, p, seed);
}

RecoveryReport run_trial(const ExperimentConfig& c, double p, std::size_t trial_index) {
  validate(c);
  const TrialInstance instance = make_trial_instance(c, trial_index);
  const MergeForest forest = incomplete_agglomerative(instance.sim, trial_mask(c, instance, p));
  return evaluate_recovery(instance.tree, forest, c.n_min);
}

// ---------------------------------------------------------------------------
// Sweep

SweepResult sweep(const ExperimentConfig& c, unsigned threads) {
  validate(c);
  const std::vector<double> grid = resolve_p_grid(c);

  SweepResult result;
  result.outcomes.assign(grid.size(), std::vector<std::uint8_t>(c.trials, 0));

  // One work item per trial: the instance is shared by every p in the grid.
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t t = next++; t < c.trials; t = next++) {
      try {
        const TrialInstance instance = make_trial_instance(c, t);
        for (std::size_t k = 0; k < grid.size(); ++k) {
          const MergeForest forest =
              incomplete_agglomerative(instance.sim, trial_mask(c, instance, grid[k]));
          result.outcomes[k][t] = evaluate_recovery(instance.tree, forest, c.n_min).fully_recovered;
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = c.trials;
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, c.trials));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  const double thm1 = theorem1_or_nan(c);
  const double asym = asymptotic_or_nan(c);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    SweepRow row;
    row.p = grid[k];
    row.trials = c.trials;
    row.recovered = static_cast<std::size_t>(
        std::count(result.outcomes[k].begin(), result.outcomes[k].end(), std::uint8_t{1}));
    row.rate = static_cast<double>(row.recovered) / static_cast<double>(row.trials);
    const Interval ci = wilson_interval(row.recovered, row.trials);
    row.ci_low = ci.low;
    row.ci_high = ci.high;
    row.thm1_rate = thm1;
    row.thm_asym_rate = asym;
    result.rows.push_back(row);
  }

  if (!c.output_path.empty()) io::write_text_file(c.output_path, sweep_csv(result));
  return result;
}

void write_sweep_csv(const SweepResult& result, std::ostream& out) {
  out << kSweepCsvHeader << '\n';
  for (const SweepRow& r : result.rows) {
    out << fmt(r.p) << ',' << r.trials << ',' << r.recovered << ',' << fmt(r.rate) << ','
        << fmt(r.ci_low) << ',' << fmt(r.ci_high) << ',' << fmt(r.thm1_rate) << ','
        << fmt(r.thm_asym_rate) << '\n';
  }
}

std::string sweep_csv(const SweepResult& result) {
  std::ostringstream out;
  write_sweep_csv(result, out);
  return out.str();
}

// ---------------------------------------------------------------------------
// Statistics

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (successes > trials) throw std::invalid_argument("wilson_interval: successes exceed trials");
  if (trials <= 1) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  return {std::clamp(std::min(center - half, phat), 0.0, 1.0),
          std::clamp(std::max(center + half, phat), 0.0, 1.0)};
}

double binomial_cdf(std::size_t k, std::size_t n, double p) {
  if (k >= n) return 1.0;
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return 0.0;
  const double nd = static_cast<double>(n);
  const double lp = std::log(p), lq = std::log1p(-p);
  double total = 0.0;
  for (std::size_t i = 0; i <= k; ++i) {
    const double id = static_cast<double>(i);
    const double log_term = std::lgamma(nd + 1) - std::lgamma(id + 1) - std::lgamma(nd - id + 1) +
                            id * lp + (nd - id) * lq;
    total += std::exp(log_term);
  }
  return std::min(total, 1.0);
}

// ---------------------------------------------------------------------------
// Worked examples

PaperReproduction reproduce_paper_examples() {
  PaperReproduction out;
  constexpr std::int64_t N = 1000;
  constexpr double alpha = 0.05, kappa = 3.0;

  auto check = [](std::string label, double measured, double target, double tol, bool pass) {
    return ExampleCheck{std::move(label), measured, target, tol, pass};
  };

  {
    // Clusters of size >= 75 (the example quotes delta = 0.5, beta = 0.66
    // for the minimum-N condition; the rate is evaluated at n = 75).
    PaperExample ex{"clusters >= 75 of 1000 items", N, 75.0, alpha, kappa, 0.5, 0.66};
    const auto r = bounds::theorem2_rate_for_cluster_size(N, ex.cluster_size, kappa);
    ex.rate = r.rate.value;
    ex.expected_pairs = r.expected_pairs;
    ex.expected_entries = r.expected_entries;
    ex.min_n = bounds::theorem2_min_n(alpha, ex.delta, ex.beta, kappa);
    ex.checks.push_back(check("rate", ex.rate, 0.5526, 5e-4, std::abs(ex.rate - 0.5526) <= 5e-4));
    const double rel = std::abs(ex.expected_pairs - 276020.0) / 276020.0;
    ex.checks.push_back(check("expected pairs (relative)", ex.expected_pairs, 276020.0, 1e-3, rel <= 1e-3));
    ex.checks.push_back(check("minimum N", static_cast<double>(ex.min_n), static_cast<double>(N), 0.0,
                              ex.min_n <= N));
    out.examples.push_back(std::move(ex));
  }
  {
    PaperExample ex{"clusters >= 100 of 1000 items", N, 100.0, alpha, kappa, 0.1, 1.0};
    const auto r = bounds::theorem3_rate(N, ex.delta, kappa);
    ex.rate = r.rate.value;
    ex.expected_pairs = r.expected_pairs;
    ex.expected_entries = r.expected_entries;
    ex.min_n = bounds::theorem3_min_n(alpha, ex.delta, kappa);
    ex.checks.push_back(check("rate", ex.rate, 0.4145, 5e-4, std::abs(ex.rate - 0.4145) <= 5e-4));
    ex.checks.push_back(check("rate below 42%", ex.rate, 0.42, 0.0, ex.rate < 0.42));
    ex.checks.push_back(check("minimum N", static_cast<double>(ex.min_n), static_cast<double>(N), 0.0,
                              ex.min_n <= N));
    out.examples.push_back(std::move(ex));
  }

  out.all_pass = std::all_of(out.examples.begin(), out.examples.end(), [](const PaperExample& ex) {
    return std::all_of(ex.checks.begin(), ex.checks.end(), [](const ExampleCheck& c) { return c.pass; });
  });
  return out;
}

json to_json(const PaperReproduction& r) {
  json examples = json::array();
  for (const PaperExample& ex : r.examples) {
    json checks = json::array();
    for (const ExampleCheck& c : ex.checks)
      checks.push_back(json{{"label", c.label},
                            {"measured", c.measured},
                            {"target", c.target},
                            {"tolerance", c.tolerance},
                            {"pass", c.pass}});
    examples.push_back(json{{"name", ex.name},
                            {"n_items", ex.n_items},
                            {"cluster_size", ex.cluster_size},
                            {"alpha", ex.alpha},
                            {"kappa", ex.kappa},
                            {"delta", ex.delta},
                            {"beta", ex.beta},
                            {"rate", ex.rate},
                            {"expected_pairs", ex.expected_pairs},
                            {"expected_entries", ex.expected_entries},
                            {"min_n", ex.min_n},
                            {"min_n_ok", ex.min_n <= ex.n_items},
                            {"checks", std::move(checks)}});
  }
  return json{{"examples", std::move(examples)}, {"all_pass", r.all_pass}};
}

}  // namespace sparseclust
