#pragma once

#include <cstdint>
#include <map>
#include <vector>

// Ground truth by exhaustive enumeration of all 2^{n(n-1)/2} labeled graphs,
// 3 <= n <= 6. Integer occurrence counts are keyed by edge count, so each of
// the at most 16 distinct weights p^e q^{M-e} is formed once in extended
// precision; results are exact to ~1e-18.

namespace extdeg::oracle {

struct OraclePmf {
  std::vector<double> probs;  // index k = 0..support size - 1
  double sum() const;
};

// Law of W = #{i : d_i > y} over all labeled graphs; support 0..n.
OraclePmf enumerate_wn_pmf(int n, double p, double y);

// P(d_1 > y) by enumeration (= E I_1; vertices are exchangeable).
double exact_pi1(int n, double p, double y);

// E(I_1 I_2) - E(I_1) E(I_2) by enumeration.
double exact_cov(int n, double p, double y);

// E C(W, r), 1 <= r <= n.
double exact_moment(int n, double p, double y, int r);

// (1/2) sum_k |P(W = k) - Poisson(lambda)_k| with lambda = n * exact_pi1
// and the analytic Poisson tail beyond k = n.
double exact_tvd_to_poisson(int n, double p, double y);

// Law of the m-th largest degree; support 0..n-1.
OraclePmf mth_degree_pmf(int n, double p, int m);

// Distribution of the sorted (nonincreasing) degree multiset.
std::map<std::vector<int>, double> degree_multiset_pmf(int n, double p);

}  // namespace extdeg::oracle
