#include "sparseclust/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sparseclust::bounds {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

Rate make_rate(double raw) { return Rate{raw, std::clamp(raw, 0.0, 1.0)}; }

// 1 - x^(1/m) without cancellation.
double one_minus_root(double x, double m) { return -std::expm1(std::log(x) / m); }

void check_alpha(double alpha) {
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
}

void check_asymptotic(std::int64_t N, double delta, double beta, double kappa) {
  require(N >= 2, "N must be >= 2");
  require(kappa >= kMinOversampling, "kappa must be >= 3");
  require(delta > 0.0 && delta <= 1.0, "delta must lie in (0, 1]");
  require(beta > 0.0 && beta <= 1.0, "beta must lie in (0, 1]");
}

AsymptoticRate finish(std::int64_t N, double raw, double cluster_size) {
  AsymptoticRate out;
  out.rate = make_rate(raw);
  out.cluster_size = cluster_size;
  out.expected_pairs = expected_samples(N, out.rate.value);
  out.expected_entries = out.rate.value * static_cast<double>(N) * static_cast<double>(N);
  return out;
}

}  // namespace

double prop2_union_term(std::int64_t N, std::int64_t n, double alpha) {
  require(N >= 4, "prop2: N must be >= 4");
  require(n >= 4 && n <= N, "prop2: cluster size must satisfy 4 <= n <= N");
  check_alpha(alpha);
  const double c = alpha * static_cast<double>(n) / (kConnectivityDivisor * static_cast<double>(N));
  return one_minus_root(c, static_cast<double>(n) / 2.0);
}

double prop2_gilbert_term(std::int64_t n) {
  require(n >= 4, "prop2: cluster size must be >= 4");
  const double inner = std::expm1(std::log(2.0) / static_cast<double>(n - 1));  // 2^(1/(n-1)) - 1
  return one_minus_root(inner, static_cast<double>(n) / 2.0);
}

Rate prop2_rate(std::int64_t N, std::int64_t n, double alpha) {
  return make_rate(std::max(prop2_union_term(N, n, alpha), prop2_gilbert_term(n)));
}

Rate prop3_rate(std::int64_t N, std::int64_t n, double alpha) {
  require(n >= 1 && n <= N, "prop3: cluster size must satisfy 1 <= n <= N");
  check_alpha(alpha);
  if (N == n) return make_rate(0.0);
  const double base = alpha / (2.0 * static_cast<double>(N - n));
  return make_rate(one_minus_root(base, static_cast<double>(n)));
}

Rate theorem1_rate(std::int64_t N, std::int64_t n, double alpha) {
  require(N > n, "theorem1: N must exceed the cluster size");
  const Rate intra = prop2_rate(N, n, alpha);
  const Rate inter = prop3_rate(N, n, alpha);
  return make_rate(std::max(intra.raw, inter.raw));
}

AsymptoticRate theorem2_rate(std::int64_t N, double delta, double beta, double kappa) {
  check_asymptotic(N, delta, beta, kappa);
  const double logn = std::log(static_cast<double>(N));
  const double raw = (2.0 * kappa / delta) * std::pow(static_cast<double>(N), -beta) * logn;
  return finish(N, raw, delta * std::pow(static_cast<double>(N), beta));
}

AsymptoticRate theorem2_rate_for_cluster_size(std::int64_t N, double cluster_size, double kappa) {
  require(N >= 2, "N must be >= 2");
  require(kappa >= kMinOversampling, "kappa must be >= 3");
  require(cluster_size > 0.0 && cluster_size <= static_cast<double>(N),
          "cluster size must lie in (0, N]");
  const double raw = 2.0 * kappa * std::log(static_cast<double>(N)) / cluster_size;
  return finish(N, raw, cluster_size);
}

std::int64_t theorem2_min_n(double alpha, double delta, double beta, double kappa) {
  check_alpha(alpha);
  check_asymptotic(2, delta, beta, kappa);
  const double inter = std::pow(alpha / 2.0, 1.0 / (1.0 - 2.0 * kappa));
  const double intra = std::pow(alpha * delta / kConnectivityDivisor, 1.0 / (1.0 - beta - kappa));
  return static_cast<std::int64_t>(std::ceil(std::max({4.0, inter, intra})));
}

AsymptoticRate theorem3_rate(std::int64_t N, double delta, double kappa) {
  return theorem2_rate(N, delta, 1.0, kappa);
}

std::int64_t theorem3_min_n(double alpha, double delta, double kappa) {
  return theorem2_min_n(alpha, delta, 1.0, kappa);
}

double expected_samples(std::int64_t N, double p) {
  return p * static_cast<double>(N) * static_cast<double>(N - 1) / 2.0;
}

double gilbert_lower_bound(std::int64_t n, double p) {
  require(n >= 2, "gilbert: n must be >= 2");
  require(p >= 0.0 && p <= 1.0, "gilbert: p must lie in [0, 1]");
  const double q = 1.0 - p;
  const double nd = static_cast<double>(n);
  const double shared = std::pow(1.0 + std::pow(q, (nd - 2.0) / 2.0), nd - 1.0);
  const double tree_term =
      std::pow(q, nd - 1.0) * (shared - std::pow(q, (nd - 1.0) * (nd - 2.0) / 2.0));
  const double split_term = std::pow(q, nd / 2.0) * (shared - 1.0);
  return 1.0 - tree_term - split_term;
}

LemmaCheck lemma1_check(std::int64_t n, double q) {
  require(n >= 4, "lemma1: n must be >= 4");
  require(q >= 0.0 && q <= 1.0, "lemma1: q must lie in [0, 1]");
  const double nd = static_cast<double>(n);
  const double half = std::pow(q, nd / 2.0);
  LemmaCheck out;
  out.lhs = 2.0 * half * std::pow(1.0 + std::pow(q, (nd - 2.0) / 2.0), nd - 1.0);
  out.rhs = kLemmaScale * half * std::pow(1.0 + half, nd - 1.0);
  out.holds = out.lhs <= out.rhs;
  return out;
}

}  // namespace sparseclust::bounds
