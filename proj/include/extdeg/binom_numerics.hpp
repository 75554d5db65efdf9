#pragma once

#include <cstdint>

// Numerically stable binomial and normal primitives.
//
// Conventions used throughout the library:
//   - all logarithms are natural logs
//   - exceedance events are strict: binom_tail(y) = P(B > y) for a real
//     threshold y, so for an integer k the event {B > k} means {B >= k+1}
//   - probabilities live in linear space, with log-space kernels underneath;
//     small tails are never formed as 1 - (large CDF)

namespace extdeg {

struct BinomialSpec {
  std::int64_t trials = 0;
  double success_prob = 0.5;

  // throws std::domain_error unless trials >= 0 and 0 < success_prob < 1
  void validate() const;
};

// Event {B > threshold} with a strict real cut. threshold < 0 gives
// probability 1, threshold >= trials gives 0.
struct TailQuery {
  BinomialSpec spec;
  double threshold = 0.0;
};

// log P(B = k) via Stirling-error decomposition (Loader's method); keeps
// relative accuracy of the pmf near machine precision even for huge n,
// where a naive lgamma difference would lose ~8 digits.
double log_binom_pmf(const BinomialSpec& spec, std::int64_t k);
double binom_pmf(const BinomialSpec& spec, std::int64_t k);

// P(B > threshold), strict. Mode-anchored compensated summation for
// trials <= 10^4, regularized incomplete beta (Lentz continued fraction)
// above that. Absolute error <= 1e-13.
double binom_tail(const TailQuery& query);
double binom_tail(const BinomialSpec& spec, double threshold);

// Complementary pair: normal_cdf(x) + normal_tail(x) == 1 to 1e-15.
// normal_tail has its own cancellation-free path (erfc in extended
// precision), accurate in relative terms as far down as double can
// represent the result.
double normal_cdf(double x);
double normal_tail(double x);

// Mills-ratio tail approximation phi(x)/x, x > 0. Underflows to 0 in
// double for x >~ 38.6; log_mills_tail stays finite.
double mills_tail_approx(double x);
double log_mills_tail(double x);

// Local central limit (de Moivre-Laplace) pointwise pmf approximation
// (2 pi n p q)^{-1/2} exp(-(k-np)^2 / (2npq)).
double local_clt_pmf(const BinomialSpec& spec, std::int64_t k);

// Uspensky's local approximation with explicit error bound, valid for
// npq >= 25. w must place np + w*sqrt(npq) on an integer in [0, trials]
// (callers round k and recompute w). Guarantees
// |P(B = np + w sqrt(npq)) - approx| < delta_bound.
struct UspenskyLocal {
  double approx = 0.0;
  double delta_bound = 0.0;
};
UspenskyLocal uspensky_local(const BinomialSpec& spec, double w);

// Berry-Esseen bound for the standardized binomial tail, n >= 2:
// sup_w |P((B-np)/sqrt(npq) > w) - normal_tail(w)| <= C (p^2+q^2)/(sqrt(pq) sqrt(n))
// with the Esseen constant C = (sqrt(10)+3)/(6 sqrt(2 pi)).
double berry_esseen_bound(const BinomialSpec& spec);
double berry_esseen_constant();

namespace detail {
// The two tail routes behind binom_tail, each P(B >= kmin) for
// 1 <= kmin <= trials. Exposed so tests can pit them against each other.
double binom_tail_direct(const BinomialSpec& spec, std::int64_t kmin);
double binom_tail_beta(const BinomialSpec& spec, std::int64_t kmin);

double stirling_error(std::int64_t n);
double binom_deviance(double x, double np);  // x log(x/np) + np - x, stable
}  // namespace detail

}  // namespace extdeg
