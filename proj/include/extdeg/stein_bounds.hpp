#pragma once

#include <cstdint>
#include <utility>

// Closed-form quantities for the exceedance count W_n of G(n,p) vertex
// degrees over the Gumbel-normalized level x_n(t) = a_n t + b_n:
// normalization constants, real-degree thresholds, the exceedance
// probability pi1 and its mean lambda_n = n pi1, the exact and asymptotic
// indicator covariance, the exact and asymptotic Stein-Chen total-variation
// bounds, the limiting extreme-order-statistic CDF, the Cramer-equation
// threshold, and the combinatorial moment bounds for E C(X, r).
//
// Centering convention: degrees are centered at (n-1)p and scaled by
// sqrt((n-1)pq) -- the exact degree moments.

namespace extdeg {

struct ModelParams {
  std::int64_t n = 3;   // vertex count, n >= 3
  double p = 0.5;       // edge probability, 0 < p < 1
  double t = 0.0;       // level
  int m = 1;            // order-statistic rank, 1 <= m <= n

  void validate() const;  // throws std::domain_error on violation
};

struct ThresholdSet {
  double a_n = 0.0;
  double b_n = 0.0;
  double x_n = 0.0;  // a_n * t + b_n
  double y = 0.0;    // (n-1) p + x_n sqrt((n-1) p q), raw-degree scale
};

struct BoundReport {
  double a_n = 0.0, b_n = 0.0, x_n = 0.0, y = 0.0;
  double pi1 = 0.0;        // P(deg > y) = P(B_{n-1} > y)
  double lambda = 0.0;     // n * pi1
  double cov_exact = 0.0;  // Cov(I_1, I_2), exact two-vertex formula
  double cov_asym = 0.0;   // 2 e^{-2t} log n / n^3
  double utvd_exact = 0.0;
  double utvd_asym = 0.0;
  bool degenerate = false;  // pi1 underflowed; utvd_exact reported as 0
  bool low_npq = false;     // npq < 25: local-limit error bounds not asserted
};

// a_n = (2 log n)^{-1/2},
// b_n = (2 log n)^{1/2} - (1/2)(2 log n)^{-1/2}(log log n + log 4 pi).
// Requires n >= 3.
std::pair<double, double> normalization(std::int64_t n);

ThresholdSet thresholds(const ModelParams& params);

// pi1 = P(B_{n-1} > y) with y from thresholds(params).
double pi1(const ModelParams& params);

// Cov(I_1, I_2) = p q [P(B_{n-2} > y-1) - P(B_{n-2} > y)]^2, computed from
// tails so integer y needs no special-casing. Always >= 0.
double cov_exact(std::int64_t n, double p, double y);

// 2 e^{-2t} log(n) / n^3.
double cov_asymptotic(const ModelParams& params);

// (1 - e^{-lambda}) [pi1 + n(n-1) Cov / lambda]. Returns 0 when pi1
// underflows (degenerate-bound condition).
double utvd_exact(const ModelParams& params);
double utvd_exact_at(std::int64_t n, double p, double y);

// Asymptotic form (1 + 2 log n)/n * e^{-t} (1 - e^{-e^{-t}}), i.e. the
// positive factor obtained by combining lambda_n -> e^{-t} with the
// (1 - e^{-lambda}) prefactor of the exact bound.
double utvd_asymptotic(const ModelParams& params);

// e^{-e^{-t}} sum_{k=0}^{m-1} e^{-tk}/k!  ==  P(Poisson(e^{-t}) <= m-1).
// m = 1 is the Gumbel CDF.
double limit_cdf(int m, double t);

double poisson_pmf(double lambda, std::int64_t k);
double poisson_cdf(double lambda, std::int64_t kmax);   // P(X <= kmax)
double poisson_tail(double lambda, std::int64_t kmax);  // P(X > kmax)

// Solves n phi(x)/x = c on the decreasing branch x >= 1 by safeguarded
// Newton from sqrt(2 log(n/c)); residual <= 1e-12 relative to c.
double cramer_threshold(std::int64_t n, double c);

// Bracketing bounds for E C(X, r) where X counts vertices of degree >= K:
//   C(n,r) P(Bin(n-r,p) >= K)^r  <=  E C(X,r)  <=  C(n,r) P(Bin(n-r,p) >= K-r-1)^r.
// ">= K" is interpreted as the strict event {B > K - eps}; half-integer
// K grids make this unambiguous. Requires 1 <= r <= n-1.
std::pair<double, double> moment_bounds(std::int64_t n, double p, int r, double K);

// Everything above for one instance, with degeneracy/low-npq flags.
BoundReport bound_report(const ModelParams& params);

}  // namespace extdeg
