// sparseclust: command-line front end.
//
// Exit codes: 0 success, 1 a reproduce-paper check failed, 2 invalid
// arguments or config, 3 I/O failure.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sparseclust/bounds.hpp"
#include "sparseclust/clustering.hpp"
#include "sparseclust/harness.hpp"
#include "sparseclust/io.hpp"
#include "sparseclust/sampling.hpp"
#include "sparseclust/synth.hpp"

namespace sc = sparseclust;
namespace bounds = sparseclust::bounds;
using nlohmann::json;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitIo = 3;

void emit_json(const json& j, const std::string& out_path) {
  if (out_path.empty())
    std::cout << j.dump(2) << '\n';
  else
    sc::io::write_json_file(out_path, j);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument("bad number in list: '" + field + "'");
    out.push_back(v);
  }
  return out;
}

struct GenerateArgs {
  std::string shape = "balanced";
  std::size_t n = 64;
  std::uint64_t seed = 1;
  double jitter = 0.5;
  std::string out_tree = "tree.json";
  std::string out_sim = "sim.bin";
};

struct SampleArgs {
  std::size_t n = 0;
  double p = 1.0;
  std::uint64_t seed = 1;
  std::string out = "mask.csv";
};

struct ClusterArgs {
  std::string sim, mask, out;
  bool reference = false;
};

struct EvaluateArgs {
  std::string truth, forest, out;
  std::size_t n_min = 1;
};

struct BoundsArgs {
  std::string theorem = "1";
  std::int64_t n_items = 0;
  std::optional<double> cluster_size;
  double alpha = 0.05;
  double kappa = 3.0;
  std::optional<double> delta;
  double beta = 1.0;
  std::optional<double> p;
  std::optional<double> q;
  std::string out;
};

struct SweepArgs {
  std::string config;
  std::optional<std::size_t> n_items, n_min, trials;
  std::optional<std::string> shape, out, p_grid;
  std::optional<double> alpha, kappa, jitter;
  std::optional<std::uint64_t> seed;
  bool independent = false;
  unsigned threads = 0;
};

int run_generate(const GenerateArgs& a) {
  const auto tree = sc::generate_tree({sc::parse_shape(a.shape), a.n, a.seed});
  const auto sim = sc::generate_tc_similarities(tree, a.seed, a.jitter);
  sc::io::write_json_file(a.out_tree, sc::io::tree_to_json(tree));
  sc::io::write_similarity_file(a.out_sim, sim);
  return 0;
}

int run_sample(const SampleArgs& a) {
  if (a.n < 1) throw std::invalid_argument("--n must be >= 1");
  sc::io::write_mask_file(a.out, sc::sample_mask(a.n, a.p, a.seed));
  return 0;
}

int run_cluster(const ClusterArgs& a) {
  const auto sim = sc::io::read_similarity_file(a.sim);
  const auto mask = sc::io::read_mask_file(a.mask, sim.size());
  const auto forest = a.reference ? sc::incomplete_agglomerative_reference(sim, mask)
                                  : sc::incomplete_agglomerative(sim, mask);
  emit_json(sc::io::forest_to_json(forest), a.out);
  return 0;
}

int run_evaluate(const EvaluateArgs& a) {
  const auto truth = sc::io::read_tree_file(a.truth);
  const auto forest = sc::io::forest_from_json(sc::io::read_json_file(a.forest));
  emit_json(sc::io::report_to_json(sc::evaluate_recovery(truth, forest, a.n_min)), a.out);
  return 0;
}

std::int64_t cluster_size_arg(const BoundsArgs& a) {
  if (!a.cluster_size) throw std::invalid_argument("--cluster-size is required for this bound");
  const double n = *a.cluster_size;
  if (n != std::floor(n)) throw std::invalid_argument("--cluster-size must be an integer here");
  return static_cast<std::int64_t>(n);
}

json asymptotic_json(const bounds::AsymptoticRate& r, bool min_n_ok, std::int64_t min_n) {
  return json{{"rate", r.rate.value},
              {"raw", r.rate.raw},
              {"cluster_size", r.cluster_size},
              {"expected_samples", r.expected_pairs},
              {"expected_entries", r.expected_entries},
              {"min_n", min_n},
              {"min_n_ok", min_n_ok}};
}

int run_bounds(const BoundsArgs& a) {
  const std::string& t = a.theorem;
  json out;
  if (t == "1" || t == "prop2" || t == "prop3") {
    const std::int64_t n = cluster_size_arg(a);
    const bounds::Rate r = t == "1"       ? bounds::theorem1_rate(a.n_items, n, a.alpha)
                           : t == "prop2" ? bounds::prop2_rate(a.n_items, n, a.alpha)
                                          : bounds::prop3_rate(a.n_items, n, a.alpha);
    out = json{{"rate", r.value},
               {"raw", r.raw},
               {"expected_samples", bounds::expected_samples(a.n_items, r.value)},
               {"min_n_ok", a.n_items >= 4}};
  } else if (t == "2") {
    if (a.delta) {
      const auto r = bounds::theorem2_rate(a.n_items, *a.delta, a.beta, a.kappa);
      const auto min_n = bounds::theorem2_min_n(a.alpha, *a.delta, a.beta, a.kappa);
      out = asymptotic_json(r, a.n_items >= min_n, min_n);
    } else {
      // Cluster-size form; delta is implied by n = delta N^beta.
      if (!a.cluster_size) throw std::invalid_argument("theorem 2 needs --delta or --cluster-size");
      const auto r = bounds::theorem2_rate_for_cluster_size(a.n_items, *a.cluster_size, a.kappa);
      const double delta = *a.cluster_size / std::pow(static_cast<double>(a.n_items), a.beta);
      const auto min_n = bounds::theorem2_min_n(a.alpha, delta, a.beta, a.kappa);
      out = asymptotic_json(r, a.n_items >= min_n, min_n);
    }
  } else if (t == "3") {
    const double delta =
        a.delta ? *a.delta
                : (a.cluster_size ? *a.cluster_size / static_cast<double>(a.n_items)
                                  : throw std::invalid_argument("theorem 3 needs --delta or --cluster-size"));
    const auto r = bounds::theorem3_rate(a.n_items, delta, a.kappa);
    const auto min_n = bounds::theorem3_min_n(a.alpha, delta, a.kappa);
    out = asymptotic_json(r, a.n_items >= min_n, min_n);
  } else if (t == "gilbert") {
    if (!a.p) throw std::invalid_argument("gilbert needs --p");
    const std::int64_t n = cluster_size_arg(a);
    out = json{{"bound", bounds::gilbert_lower_bound(n, *a.p)}, {"n", n}, {"p", *a.p}};
  } else if (t == "lemma1") {
    const double q = a.q ? *a.q : (a.p ? 1.0 - *a.p : throw std::invalid_argument("lemma1 needs --q or --p"));
    const std::int64_t n = cluster_size_arg(a);
    const auto c = bounds::lemma1_check(n, q);
    out = json{{"lhs", c.lhs}, {"rhs", c.rhs}, {"holds", c.holds}, {"n", n}, {"q", q}};
  } else {
    throw std::invalid_argument("unknown --theorem '" + t + "'");
  }
  emit_json(out, a.out);
  return 0;
}

int run_sweep(const SweepArgs& a) {
  sc::ExperimentConfig config;
  if (!a.config.empty()) config = sc::config_from_json(sc::io::read_json_file(a.config));
  if (a.n_items) config.n_items = *a.n_items;
  if (a.n_min) config.n_min = *a.n_min;
  if (a.trials) config.trials = *a.trials;
  if (a.shape) config.tree_shape = sc::parse_shape(*a.shape);
  if (a.out) config.output_path = *a.out;
  if (a.p_grid) config.p_grid = parse_list(*a.p_grid);
  if (a.alpha) config.alpha = *a.alpha;
  if (a.kappa) config.kappa = *a.kappa;
  if (a.jitter) config.jitter = *a.jitter;
  if (a.seed) config.master_seed = *a.seed;
  if (a.independent) config.common_random_numbers = false;
  sc::validate(config);

  const auto result = sc::sweep(config, a.threads);
  if (config.output_path.empty()) sc::write_sweep_csv(result, std::cout);
  return 0;
}

int run_reproduce(bool as_json) {
  const auto r = sc::reproduce_paper_examples();
  if (as_json) {
    std::cout << sc::to_json(r).dump(2) << '\n';
  } else {
    for (const auto& ex : r.examples) {
      std::cout << ex.name << ": p = " << ex.rate << ", expected pairs = " << ex.expected_pairs
                << ", expected matrix entries = " << ex.expected_entries
                << ", minimum N = " << ex.min_n << '\n';
      for (const auto& c : ex.checks)
        std::cout << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.label << ": " << c.measured
                  << " vs " << c.target << '\n';
    }
  }
  return r.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical clustering from randomly observed pairwise similarities"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Random hierarchy and TC similarities");
  generate->add_option("--shape", gen.shape, "balanced | random_unbalanced | caterpillar")
      ->capture_default_str();
  generate->add_option("--n", gen.n, "Number of items")->capture_default_str();
  generate->add_option("--seed", gen.seed)->capture_default_str();
  generate->add_option("--jitter", gen.jitter, "In [0, 1)")->capture_default_str();
  generate->add_option("--out-tree", gen.out_tree)->capture_default_str();
  generate->add_option("--out-sim", gen.out_sim, ".bin for binary, CSV otherwise")->capture_default_str();

  SampleArgs smp;
  auto* sample = app.add_subcommand("sample", "Bernoulli observation mask");
  sample->add_option("--n", smp.n)->required();
  sample->add_option("--p", smp.p)->required();
  sample->add_option("--seed", smp.seed)->capture_default_str();
  sample->add_option("--out", smp.out)->capture_default_str();

  ClusterArgs cl;
  auto* cluster = app.add_subcommand("cluster", "Agglomerative clustering on observed similarities");
  cluster->add_option("--sim", cl.sim)->required();
  cluster->add_option("--mask", cl.mask)->required();
  cluster->add_option("--out", cl.out, "Forest JSON (stdout if omitted)");
  cluster->add_flag("--reference", cl.reference, "Use the O(N^3) reference implementation");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Compare a forest with the true hierarchy");
  evaluate->add_option("--truth", ev.truth)->required();
  evaluate->add_option("--forest", ev.forest)->required();
  evaluate->add_option("--n-min", ev.n_min)->capture_default_str();
  evaluate->add_option("--out", ev.out, "Report JSON (stdout if omitted)");

  BoundsArgs bd;
  auto* bnds = app.add_subcommand("bounds", "Evaluate a sampling-rate bound");
  bnds->add_option("--theorem", bd.theorem, "1 | 2 | 3 | prop2 | prop3 | gilbert | lemma1")
      ->capture_default_str();
  bnds->add_option("--n-items", bd.n_items);
  bnds->add_option("--cluster-size", bd.cluster_size);
  bnds->add_option("--alpha", bd.alpha)->capture_default_str();
  bnds->add_option("--kappa", bd.kappa)->capture_default_str();
  bnds->add_option("--delta", bd.delta);
  bnds->add_option("--beta", bd.beta)->capture_default_str();
  bnds->add_option("--p", bd.p, "Edge probability (gilbert)");
  bnds->add_option("--q", bd.q, "1 - p (lemma1)");
  bnds->add_option("--out", bd.out);

  SweepArgs sw;
  auto* swp = app.add_subcommand("sweep", "Monte Carlo recovery sweep over sampling rates");
  swp->add_option("--config", sw.config, "Experiment config JSON");
  swp->add_option("--n-items", sw.n_items);
  swp->add_option("--n-min", sw.n_min);
  swp->add_option("--trials", sw.trials);
  swp->add_option("--shape", sw.shape);
  swp->add_option("--out", sw.out, "CSV path (stdout if omitted)");
  swp->add_option("--p-grid", sw.p_grid, "Comma-separated sampling rates");
  swp->add_option("--alpha", sw.alpha);
  swp->add_option("--kappa", sw.kappa);
  swp->add_option("--jitter", sw.jitter);
  swp->add_option("--seed", sw.seed);
  swp->add_flag("--independent", sw.independent, "Fresh mask draws per p instead of common random numbers");
  swp->add_option("--threads", sw.threads, "Worker threads (0 = all cores)");

  bool repro_json = false;
  auto* repro = app.add_subcommand("reproduce-paper", "Recompute the two worked sampling-rate examples");
  repro->add_flag("--json", repro_json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*generate) return run_generate(gen);
    if (*sample) return run_sample(smp);
    if (*cluster) return run_cluster(cl);
    if (*evaluate) return run_evaluate(ev);
    if (*bnds) return run_bounds(bd);
    if (*swp) return run_sweep(sw);
    if (*repro) return run_reproduce(repro_json);
  } catch (const sc::io::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}
