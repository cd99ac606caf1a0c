#pragma once

// Closed-form sampling-rate bounds for recovering every cluster of size >= n
// from similarities observed independently with probability p, together with
// the random-graph inequalities they are built on.
//
// All logarithms are natural. Terms of the form 1 - x^(1/m) are evaluated as
// -expm1(log(x) / m) so they keep full relative precision when x^(1/m) is
// close to 1 (large cluster sizes).
//
// Every rate is returned both raw and clamped to [0, 1]; inequality checks
// should use the raw value.

#include <cstddef>
#include <cstdint>

namespace sparseclust::bounds {

/// Divisor in the union-bound constant C = alpha * n / (78 * N) that balances
/// the two intra-cluster connectivity terms.
inline constexpr double kConnectivityDivisor = 78.0;
/// lambda = 10 makes the middle Gilbert term at most 2*lambda = 20 times
/// q^(n/2) (1 + q^(n/2))^(n-1) for every n >= 4.
inline constexpr double kLemmaLambda = 10.0;
inline constexpr double kLemmaScale = 2.0 * kLemmaLambda;
/// Smallest oversampling factor the asymptotic rates are stated for.
inline constexpr double kMinOversampling = 3.0;

struct Rate {
  double raw = 0.0;
  double value = 0.0;  // raw clamped to [0, 1]
};

/// Parameters shared by the bounds. Not every field is used by every bound;
/// the per-bound functions check what they need.
struct BoundParams {
  std::int64_t n_items = 0;       // N
  std::int64_t cluster_size = 0;  // n
  double alpha = 0.05;            // failure probability
  double kappa = 3.0;             // oversampling factor
  double delta = 1.0;             // cluster fraction
  double beta = 1.0;              // cluster-size exponent
};

/// Intra-cluster connectivity rate:
/// max{1 - (alpha n / 78N)^(2/n), 1 - (2^(1/(n-1)) - 1)^(2/n)}.
/// Requires N >= 4, 4 <= n <= N, alpha in (0, 1).
Rate prop2_rate(std::int64_t N, std::int64_t n, double alpha);
/// The two terms of prop2_rate, raw.
double prop2_union_term(std::int64_t N, std::int64_t n, double alpha);
double prop2_gilbert_term(std::int64_t n);

/// Inter-cluster rate 1 - (alpha / (2(N - n)))^(1/n). Returns 0 when N == n
/// (there is no other cluster to link to). Requires 1 <= n <= N.
Rate prop3_rate(std::int64_t N, std::int64_t n, double alpha);

/// max(prop2_rate, prop3_rate): sufficient rate for recovering every cluster
/// of size >= n with probability >= 1 - alpha.
Rate theorem1_rate(std::int64_t N, std::int64_t n, double alpha);

struct AsymptoticRate {
  Rate rate;
  double cluster_size = 0.0;      // n = delta * N^beta
  double expected_pairs = 0.0;    // p * N(N-1)/2, unordered pairs
  double expected_entries = 0.0;  // p * N^2, entries of the full N x N mask
};

/// (2 kappa / delta) N^(-beta) ln N, for clusters of size delta N^beta.
/// Requires kappa >= 3, delta in (0, 1], beta in (0, 1], N >= 2.
AsymptoticRate theorem2_rate(std::int64_t N, double delta, double beta, double kappa);
/// The same rate written against the cluster size directly: 2 kappa ln N / n.
AsymptoticRate theorem2_rate_for_cluster_size(std::int64_t N, double cluster_size, double kappa);
/// ceil(max{4, (alpha/2)^(1/(1-2kappa)), (alpha delta / 78)^(1/(1-beta-kappa))}).
std::int64_t theorem2_min_n(double alpha, double delta, double beta, double kappa);

/// theorem2_rate with beta = 1 (clusters of size delta N).
AsymptoticRate theorem3_rate(std::int64_t N, double delta, double kappa);
std::int64_t theorem3_min_n(double alpha, double delta, double kappa);

/// Expected number of observed unordered pairs, p N (N-1) / 2.
double expected_samples(std::int64_t N, double p);

/// Gilbert's lower bound on P(G(n, p) is connected), evaluated literally:
/// 1 - q^(n-1) ((1 + q^((n-2)/2))^(n-1) - q^((n-1)(n-2)/2))
///   - q^(n/2) ((1 + q^((n-2)/2))^(n-1) - 1),  q = 1 - p.
/// Unclamped; negative for small p. Requires n >= 2, p in [0, 1].
double gilbert_lower_bound(std::int64_t n, double p);

struct LemmaCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// 2 q^(n/2) (1 + q^((n-2)/2))^(n-1)  <=  20 q^(n/2) (1 + q^(n/2))^(n-1).
/// Requires n >= 4, q in [0, 1].
LemmaCheck lemma1_check(std::int64_t n, double q);

}  // namespace sparseclust::bounds
