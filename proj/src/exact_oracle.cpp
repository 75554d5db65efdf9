#include "extdeg/exact_oracle.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "extdeg/stein_bounds.hpp"

namespace extdeg::oracle {

namespace {

constexpr int kMaxVertices = 6;  // 2^15 labeled graphs; n = 7 would be 2^21

void check_n(int n) {
  if (n < 3 || n > kMaxVertices)
    throw std::domain_error("exact_oracle: n must lie in 3..6 (cost guard)");
}

int pair_count(int n) { return n * (n - 1) / 2; }

struct PairTable {
  std::array<std::pair<int, int>, 15> pairs{};
  int count = 0;
};

PairTable make_pairs(int n) {
  PairTable t;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) t.pairs[t.count++] = {i, j};
  return t;
}

// Visit every labeled graph: v(degrees, edge_count).
template <class Visit>
void enumerate(int n, Visit&& v) {
  const PairTable t = make_pairs(n);
  const std::uint32_t mask_end = 1u << t.count;
  std::array<int, kMaxVertices> deg{};
  for (std::uint32_t mask = 0; mask < mask_end; ++mask) {
    deg.fill(0);
    std::uint32_t bits = mask;
    while (bits) {
      const int e = std::countr_zero(bits);
      bits &= bits - 1;
      ++deg[t.pairs[e].first];
      ++deg[t.pairs[e].second];
    }
    v(deg, std::popcount(mask));
  }
}

// Occurrence counts keyed by edge count -> probability, forming each
// weight p^e q^{M-e} once in extended precision.
double combine(const std::vector<std::uint32_t>& counts_by_edges, int M, double p) {
  const long double pl = p, ql = 1.0L - pl;
  long double total = 0.0L;
  for (int e = 0; e <= M; ++e) {
    if (counts_by_edges[e] == 0) continue;
    total += static_cast<long double>(counts_by_edges[e]) *
             std::pow(pl, static_cast<long double>(e)) *
             std::pow(ql, static_cast<long double>(M - e));
  }
  return static_cast<double>(total);
}

}  // namespace

double OraclePmf::sum() const {
  double s = 0.0;
  for (double v : probs) s += v;
  return s;
}

OraclePmf enumerate_wn_pmf(int n, double p, double y) {
  check_n(n);
  const int M = pair_count(n);
  std::vector<std::vector<std::uint32_t>> counts(
      static_cast<std::size_t>(n) + 1, std::vector<std::uint32_t>(M + 1, 0));
  enumerate(n, [&](const std::array<int, kMaxVertices>& deg, int edges) {
    int w = 0;
    for (int i = 0; i < n; ++i) w += deg[i] > y ? 1 : 0;
    ++counts[w][edges];
  });
  OraclePmf pmf;
  pmf.probs.resize(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) pmf.probs[k] = combine(counts[k], M, p);
  return pmf;
}

double exact_pi1(int n, double p, double y) {
  check_n(n);
  const int M = pair_count(n);
  std::vector<std::uint32_t> hits(M + 1, 0);
  enumerate(n, [&](const std::array<int, kMaxVertices>& deg, int edges) {
    if (deg[0] > y) ++hits[edges];
  });
  return combine(hits, M, p);
}

double exact_cov(int n, double p, double y) {
  check_n(n);
  const int M = pair_count(n);
  std::vector<std::uint32_t> hits1(M + 1, 0), hits12(M + 1, 0);
  enumerate(n, [&](const std::array<int, kMaxVertices>& deg, int edges) {
    const bool i1 = deg[0] > y, i2 = deg[1] > y;
    if (i1) ++hits1[edges];
    if (i1 && i2) ++hits12[edges];
  });
  const double e1 = combine(hits1, M, p);
  const double e12 = combine(hits12, M, p);
  return e12 - e1 * e1;
}

double exact_moment(int n, double p, double y, int r) {
  check_n(n);
  if (r < 1 || r > n) throw std::domain_error("exact_moment: requires 1 <= r <= n");
  const OraclePmf pmf = enumerate_wn_pmf(n, p, y);
  double expectation = 0.0;
  for (int k = r; k <= n; ++k) {
    double choose = 1.0;
    for (int i = 0; i < r; ++i)
      choose *= static_cast<double>(k - i) / static_cast<double>(i + 1);
    expectation += choose * pmf.probs[k];
  }
  return expectation;
}

double exact_tvd_to_poisson(int n, double p, double y) {
  check_n(n);
  const OraclePmf pmf = enumerate_wn_pmf(n, p, y);
  const double lambda = static_cast<double>(n) * exact_pi1(n, p, y);
  double sum = 0.0;
  for (int k = 0; k <= n; ++k)
    sum += std::fabs(pmf.probs[k] - poisson_pmf(lambda, k));
  sum += poisson_tail(lambda, n);
  return 0.5 * sum;
}

OraclePmf mth_degree_pmf(int n, double p, int m) {
  check_n(n);
  if (m < 1 || m > n) throw std::domain_error("mth_degree_pmf: requires 1 <= m <= n");
  const int M = pair_count(n);
  std::vector<std::vector<std::uint32_t>> counts(
      static_cast<std::size_t>(n), std::vector<std::uint32_t>(M + 1, 0));
  enumerate(n, [&](const std::array<int, kMaxVertices>& deg, int edges) {
    std::array<int, kMaxVertices> sorted = deg;
    std::sort(sorted.begin(), sorted.begin() + n, std::greater<>());
    ++counts[sorted[m - 1]][edges];
  });
  OraclePmf pmf;
  pmf.probs.resize(static_cast<std::size_t>(n));
  for (int d = 0; d < n; ++d) pmf.probs[d] = combine(counts[d], M, p);
  return pmf;
}

std::map<std::vector<int>, double> degree_multiset_pmf(int n, double p) {
  check_n(n);
  const int M = pair_count(n);
  std::map<std::vector<int>, std::vector<std::uint32_t>> counts;
  enumerate(n, [&](const std::array<int, kMaxVertices>& deg, int edges) {
    std::vector<int> key(deg.begin(), deg.begin() + n);
    std::sort(key.begin(), key.end(), std::greater<>());
    auto [it, inserted] = counts.try_emplace(key, std::vector<std::uint32_t>(M + 1, 0));
    ++it->second[edges];
  });
  std::map<std::vector<int>, double> pmf;
  for (const auto& [key, by_edges] : counts) pmf[key] = combine(by_edges, M, p);
  return pmf;
}

}  // namespace extdeg::oracle
