#include "extdeg/graph_sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "extdeg/binom_numerics.hpp"

namespace extdeg {

// ---------------------------------------------------------------------------
// Philox4x32-10

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                      std::uint32_t& hi) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(product);
  hi = static_cast<std::uint32_t>(product >> 32);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mul_hi_lo(kPhiloxM0, ctr[0], lo0, hi0);
    mul_hi_lo(kPhiloxM1, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

void Philox::refill() {
  const auto block = philox4x32_10(ctr_, key_);
  out_ = {block[0], block[1], block[2], block[3]};
  idx_ = 0;
  if (++ctr_[0] == 0) ++ctr_[1];
}

double Philox::next_normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = next_unit();
  const double u2 = next_unit();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 6.283185307179586476925287 * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_normal_ = true;
  return radius * std::cos(angle);
}

// ---------------------------------------------------------------------------
// Degree sampling

DegreeSampler::DegreeSampler(std::int64_t n, double p) : n_(n), p_(p) {
  if (n < 2) throw std::domain_error("DegreeSampler: requires n >= 2");
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("DegreeSampler: p must lie in (0,1)");
  coin_path_ = (p == 0.5);
  complement_ = p > 0.5;
  edge_prob_ = complement_ ? 1.0 - p : p;
  inv_log_q_ = 1.0 / std::log1p(-edge_prob_);
  if (coin_path_) {
    plane_count_ =
        std::max(1, static_cast<int>(std::bit_width(static_cast<std::uint64_t>(n - 1))));
  }
}

DegreeSample DegreeSampler::sample(Philox& rng) {
  DegreeSample s;
  s.degrees.resize(static_cast<std::size_t>(n_));
  sample(rng, s.degrees);
  return s;
}

void DegreeSampler::sample(Philox& rng, std::span<std::int32_t> out) {
  if (static_cast<std::int64_t>(out.size()) != n_)
    throw std::invalid_argument("DegreeSampler::sample: out.size() != n");
  if (coin_path_)
    sample_coin(rng, out);
  else
    sample_geometric(rng, out);
}

// Fair-coin path: every vertex pair is one random bit. Row i draws its
// bits word-aligned to column positions; deg[i] takes the row popcount and
// the same masked words are pushed into bit-sliced column counters (ripple
// carry across planes), so column degrees cost O(n^2/64) word ops instead
// of one increment per edge.
void DegreeSampler::sample_coin(Philox& rng, std::span<std::int32_t> out) {
  const std::int64_t n = n_;
  const std::size_t words = static_cast<std::size_t>((n + 63) / 64);
  planes_.assign(static_cast<std::size_t>(plane_count_) * words, 0);

  std::fill(out.begin(), out.end(), 0);
  for (std::int64_t i = 0; i + 1 < n; ++i) {
    const std::int64_t first_col = i + 1;
    const std::size_t w0 = static_cast<std::size_t>(first_col >> 6);
    const std::size_t w1 = static_cast<std::size_t>((n - 1) >> 6);
    std::int64_t row_bits = 0;
    for (std::size_t w = w0; w <= w1; ++w) {
      std::uint64_t mask = ~0ull;
      if (w == w0 && (first_col & 63) != 0) mask &= ~0ull << (first_col & 63);
      if (w == w1 && (n & 63) != 0) mask &= (~0ull) >> (64 - (n & 63));
      const std::uint64_t bits = rng.next_u64() & mask;
      row_bits += std::popcount(bits);
      std::uint64_t carry = bits;
      for (int pl = 0; carry != 0 && pl < plane_count_; ++pl) {
        std::uint64_t& slot = planes_[static_cast<std::size_t>(pl) * words + w];
        const std::uint64_t next = slot & carry;
        slot ^= carry;
        carry = next;
      }
    }
    out[static_cast<std::size_t>(i)] += static_cast<std::int32_t>(row_bits);
  }
  for (std::int64_t j = 0; j < n; ++j) {
    const std::size_t w = static_cast<std::size_t>(j >> 6);
    const int bit = static_cast<int>(j & 63);
    std::int32_t col = 0;
    for (int pl = 0; pl < plane_count_; ++pl) {
      col |= static_cast<std::int32_t>(
          (planes_[static_cast<std::size_t>(pl) * words + w] >> bit) & 1u) << pl;
    }
    out[static_cast<std::size_t>(j)] += col;
  }
}

// Geometric skipping over the linearized upper-triangle pair index: the gap
// to the next present edge is ~ floor(log U / log(1-p)), so the walk does
// expected O(E) work. The row cursor advances incrementally (amortized O(n)
// per sample); for p > 1/2 the complement graph is walked instead.
void DegreeSampler::sample_geometric(Philox& rng, std::span<std::int32_t> out) {
  const std::int64_t n = n_;
  const std::int64_t total_pairs = n * (n - 1) / 2;
  std::fill(out.begin(), out.end(), 0);

  std::int64_t idx = -1;
  std::int64_t row = 0;
  std::int64_t row_base = 0;
  std::int64_t row_len = n - 1;
  for (;;) {
    const double u = rng.next_unit();
    const double gap = std::floor(std::log(u) * inv_log_q_);
    // compare before casting: gap can exceed int64 range for tiny edge_prob
    if (!(gap < static_cast<double>(total_pairs - idx))) break;
    idx += 1 + static_cast<std::int64_t>(gap);
    if (idx >= total_pairs) break;
    while (idx >= row_base + row_len) {
      row_base += row_len;
      --row_len;
      ++row;
    }
    const std::int64_t col = row + 1 + (idx - row_base);
    ++out[static_cast<std::size_t>(row)];
    ++out[static_cast<std::size_t>(col)];
  }

  if (complement_) {
    const std::int32_t full = static_cast<std::int32_t>(n - 1);
    for (auto& d : out) d = full - d;
  }
}

std::int64_t count_exceedances(std::span<const std::int32_t> degrees, double y) {
  std::int64_t count = 0;
  for (const std::int32_t d : degrees) count += static_cast<double>(d) > y ? 1 : 0;
  return count;
}

std::int32_t mth_largest(std::span<const std::int32_t> degrees, int m) {
  if (m < 1 || static_cast<std::size_t>(m) > degrees.size())
    throw std::domain_error("mth_largest: requires 1 <= m <= size");
  std::vector<std::int32_t> scratch(degrees.begin(), degrees.end());
  std::nth_element(scratch.begin(), scratch.begin() + (m - 1), scratch.end(),
                   std::greater<>());
  return scratch[static_cast<std::size_t>(m - 1)];
}

// ---------------------------------------------------------------------------
// Monte Carlo

double EmpiricalPmf::phat(std::size_t k) const {
  if (trials <= 0 || k >= counts.size()) return 0.0;
  return static_cast<double>(counts[k]) / static_cast<double>(trials);
}

double EmpiricalPmf::std_error(std::size_t k) const {
  if (trials <= 0) return 0.0;
  const double p = phat(k);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

namespace {

int resolve_workers(int worker_hint, std::int64_t trials) {
  int w = worker_hint < 1 ? 1 : worker_hint;
  if (w > 64) w = 64;
  if (static_cast<std::int64_t>(w) > trials) w = static_cast<int>(std::max<std::int64_t>(trials, 1));
  return w;
}

// Runs fn(first_trial, last_trial, slot) across workers; trial ranges are
// contiguous and every accumulator slot is private to its worker.
template <class Fn>
void parallel_trials(std::int64_t trials, int workers, Fn&& fn) {
  if (workers <= 1) {
    fn(0, trials, 0);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const std::int64_t chunk = (trials + workers - 1) / workers;
  for (int slot = 0; slot < workers; ++slot) {
    const std::int64_t first = static_cast<std::int64_t>(slot) * chunk;
    const std::int64_t last = std::min(trials, first + chunk);
    if (first >= last) break;
    pool.emplace_back([&fn, first, last, slot] { fn(first, last, slot); });
  }
  for (auto& th : pool) th.join();
}

struct WnAccumulator {
  std::vector<std::uint64_t> counts;
  std::vector<std::vector<std::uint64_t>> block_counts;
  std::vector<std::int64_t> block_trials;

  void record(std::int64_t w, int block) {
    const std::size_t k = static_cast<std::size_t>(w);
    if (k >= counts.size()) counts.resize(k + 1, 0);
    ++counts[k];
    auto& bc = block_counts[static_cast<std::size_t>(block)];
    if (k >= bc.size()) bc.resize(k + 1, 0);
    ++bc[k];
    ++block_trials[static_cast<std::size_t>(block)];
  }
};

void merge_pmf(EmpiricalPmf& pmf, std::vector<WnAccumulator>& slots, int blocks) {
  std::size_t width = 1;
  for (const auto& s : slots) width = std::max(width, s.counts.size());
  pmf.counts.assign(width, 0);
  pmf.block_counts.assign(static_cast<std::size_t>(blocks),
                          std::vector<std::uint64_t>(width, 0));
  pmf.block_trials.assign(static_cast<std::size_t>(blocks), 0);
  for (const auto& s : slots) {
    for (std::size_t k = 0; k < s.counts.size(); ++k) pmf.counts[k] += s.counts[k];
    for (int b = 0; b < blocks; ++b) {
      const auto& bc = s.block_counts[static_cast<std::size_t>(b)];
      for (std::size_t k = 0; k < bc.size(); ++k)
        pmf.block_counts[static_cast<std::size_t>(b)][k] += bc[k];
      pmf.block_trials[static_cast<std::size_t>(b)] +=
          s.block_trials[static_cast<std::size_t>(b)];
    }
  }
  // drop trailing never-observed values
  while (pmf.counts.size() > 1 && pmf.counts.back() == 0) {
    pmf.counts.pop_back();
    for (auto& bc : pmf.block_counts) bc.pop_back();
  }
}

int block_of(std::int64_t trial, std::int64_t trials, int blocks) {
  return static_cast<int>(trial * blocks / trials);
}

}  // namespace

EmpiricalPmf mc_wn_pmf(const SimConfig& config) {
  config.params.validate();
  if (config.trials <= 0) throw std::domain_error("mc_wn_pmf: trials must be > 0");
  const ThresholdSet th = thresholds(config.params);
  const int workers = resolve_workers(config.worker_hint, config.trials);
  const int blocks = static_cast<int>(
      std::min<std::int64_t>(kBootstrapBlocks, config.trials));

  std::vector<WnAccumulator> slots(static_cast<std::size_t>(workers));
  for (auto& s : slots) {
    s.counts.assign(1, 0);
    s.block_counts.assign(static_cast<std::size_t>(blocks), {});
    s.block_trials.assign(static_cast<std::size_t>(blocks), 0);
  }

  parallel_trials(config.trials, workers, [&](std::int64_t first, std::int64_t last, int slot) {
    DegreeSampler sampler(config.params.n, config.params.p);
    std::vector<std::int32_t> degrees(static_cast<std::size_t>(config.params.n));
    for (std::int64_t trial = first; trial < last; ++trial) {
      Philox rng(config.seed, static_cast<std::uint64_t>(trial));
      sampler.sample(rng, degrees);
      slots[static_cast<std::size_t>(slot)].record(
          count_exceedances(degrees, th.y),
          block_of(trial, config.trials, blocks));
    }
  });

  EmpiricalPmf pmf;
  pmf.trials = config.trials;
  merge_pmf(pmf, slots, blocks);
  return pmf;
}

double empirical_tvd(const EmpiricalPmf& pmf, double lambda) {
  if (!(lambda >= 0.0)) throw std::domain_error("empirical_tvd: lambda must be >= 0");
  if (pmf.trials <= 0) throw std::domain_error("empirical_tvd: empty pmf");
  double sum = 0.0;
  for (std::size_t k = 0; k < pmf.counts.size(); ++k)
    sum += std::fabs(pmf.phat(k) - poisson_pmf(lambda, static_cast<std::int64_t>(k)));
  sum += poisson_tail(lambda, static_cast<std::int64_t>(pmf.counts.size()) - 1);
  return 0.5 * sum;
}

double tvd_bootstrap_se(const EmpiricalPmf& pmf, double lambda, int resamples,
                        std::uint64_t seed) {
  if (resamples < 2) throw std::domain_error("tvd_bootstrap_se: resamples must be >= 2");
  const std::size_t blocks = pmf.block_counts.size();
  if (blocks < 2) return 0.0;
  Philox rng(seed, kBootstrapStream);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(resamples));
  std::vector<std::uint64_t> counts(pmf.counts.size());
  for (int r = 0; r < resamples; ++r) {
    std::fill(counts.begin(), counts.end(), 0);
    std::int64_t trials = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
      const std::size_t pick =
          static_cast<std::size_t>(rng.next_u64() % static_cast<std::uint64_t>(blocks));
      const auto& bc = pmf.block_counts[pick];
      for (std::size_t k = 0; k < bc.size(); ++k) counts[k] += bc[k];
      trials += pmf.block_trials[pick];
    }
    EmpiricalPmf resampled;
    resampled.counts = counts;
    resampled.trials = trials;
    values.push_back(empirical_tvd(resampled, lambda));
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

namespace {

// Maintains the K largest values seen so far, descending.
struct TopK {
  std::array<std::int32_t, 8> best{};
  int k = 1;
  void reset() { best.fill(INT32_MIN); }
  void offer(std::int32_t v) {
    if (v <= best[static_cast<std::size_t>(k - 1)]) return;
    int pos = k - 1;
    while (pos > 0 && best[static_cast<std::size_t>(pos - 1)] < v) {
      best[static_cast<std::size_t>(pos)] = best[static_cast<std::size_t>(pos - 1)];
      --pos;
    }
    best[static_cast<std::size_t>(pos)] = v;
  }
};

}  // namespace

std::vector<double> mc_extreme_cdf(const SimConfig& config, int m,
                                   std::span<const double> t_grid) {
  const int ms[1] = {m};
  const SimReport report = run_simulation(config, ms, t_grid);
  return report.extreme_cdf[0];
}

SimReport run_simulation(const SimConfig& config, std::span<const int> ms,
                         std::span<const double> t_grid) {
  config.params.validate();
  if (config.trials <= 0) throw std::domain_error("run_simulation: trials must be > 0");
  if (ms.empty()) throw std::domain_error("run_simulation: need at least one m");
  int max_m = 0;
  for (const int m : ms) {
    if (m < 1 || static_cast<std::int64_t>(m) > config.params.n)
      throw std::domain_error("run_simulation: m must lie in 1..n");
    max_m = std::max(max_m, m);
  }

  const ThresholdSet th0 = thresholds(config.params);
  std::vector<double> y_grid(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    ModelParams p = config.params;
    p.t = t_grid[i];
    y_grid[i] = thresholds(p).y;
  }

  const int workers = resolve_workers(config.worker_hint, config.trials);
  const int blocks = static_cast<int>(
      std::min<std::int64_t>(kBootstrapBlocks, config.trials));

  struct Slot {
    WnAccumulator wn;
    std::vector<std::uint64_t> below;  // [m index * |t_grid| + t index]
    std::int64_t violations = 0;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(workers));
  for (auto& s : slots) {
    s.wn.counts.assign(1, 0);
    s.wn.block_counts.assign(static_cast<std::size_t>(blocks), {});
    s.wn.block_trials.assign(static_cast<std::size_t>(blocks), 0);
    s.below.assign(ms.size() * t_grid.size(), 0);
  }

  const bool small_k = max_m <= 8;
  parallel_trials(config.trials, workers, [&](std::int64_t first, std::int64_t last, int slot_idx) {
    Slot& slot = slots[static_cast<std::size_t>(slot_idx)];
    DegreeSampler sampler(config.params.n, config.params.p);
    std::vector<std::int32_t> degrees(static_cast<std::size_t>(config.params.n));
    std::vector<std::int32_t> order_stats(ms.size());
    TopK top;
    top.k = max_m;
    for (std::int64_t trial = first; trial < last; ++trial) {
      Philox rng(config.seed, static_cast<std::uint64_t>(trial));
      sampler.sample(rng, degrees);

      slot.wn.record(count_exceedances(degrees, th0.y),
                     block_of(trial, config.trials, blocks));

      if (small_k) {
        top.reset();
        for (const std::int32_t d : degrees) top.offer(d);
        for (std::size_t mi = 0; mi < ms.size(); ++mi)
          order_stats[mi] = top.best[static_cast<std::size_t>(ms[mi] - 1)];
      } else {
        for (std::size_t mi = 0; mi < ms.size(); ++mi)
          order_stats[mi] = mth_largest(degrees, ms[mi]);
      }

      for (std::size_t ti = 0; ti < y_grid.size(); ++ti) {
        const std::int64_t w_t = count_exceedances(degrees, y_grid[ti]);
        for (std::size_t mi = 0; mi < ms.size(); ++mi) {
          const bool below = static_cast<double>(order_stats[mi]) <= y_grid[ti];
          if (below) ++slot.below[mi * y_grid.size() + ti];
          if (below != (w_t <= ms[mi] - 1)) ++slot.violations;
        }
      }
    }
  });

  SimReport report;
  report.w_pmf.trials = config.trials;
  std::vector<WnAccumulator> wn_slots;
  wn_slots.reserve(slots.size());
  for (auto& s : slots) wn_slots.push_back(std::move(s.wn));
  merge_pmf(report.w_pmf, wn_slots, blocks);

  report.extreme_cdf.assign(ms.size(), std::vector<double>(t_grid.size(), 0.0));
  for (std::size_t mi = 0; mi < ms.size(); ++mi)
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
      std::uint64_t hits = 0;
      for (const auto& s : slots) hits += s.below[mi * t_grid.size() + ti];
      report.extreme_cdf[mi][ti] =
          static_cast<double>(hits) / static_cast<double>(config.trials);
    }
  for (const auto& s : slots) report.duality_violations += s.violations;
  return report;
}

std::vector<double> normal_baseline(std::int64_t n, int m, std::int64_t trials,
                                    std::uint64_t seed,
                                    std::span<const double> t_grid) {
  if (n < 3) throw std::domain_error("normal_baseline: requires n >= 3");
  if (m < 1 || static_cast<std::int64_t>(m) > n)
    throw std::domain_error("normal_baseline: m must lie in 1..n");
  if (trials <= 0) throw std::domain_error("normal_baseline: trials must be > 0");

  std::vector<double> x_grid(t_grid.size());
  const auto [a, b] = normalization(n);
  for (std::size_t i = 0; i < t_grid.size(); ++i) x_grid[i] = a * t_grid[i] + b;

  std::vector<std::uint64_t> below(t_grid.size(), 0);
  std::vector<double> values(static_cast<std::size_t>(n));
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    Philox rng(seed, kBaselineTrialStream + static_cast<std::uint64_t>(trial));
    for (auto& v : values) v = rng.next_normal();
    std::nth_element(values.begin(), values.begin() + (m - 1), values.end(),
                     std::greater<>());
    const double order_stat = values[static_cast<std::size_t>(m - 1)];
    for (std::size_t i = 0; i < x_grid.size(); ++i)
      if (order_stat <= x_grid[i]) ++below[i];
  }
  std::vector<double> cdf(t_grid.size());
  for (std::size_t i = 0; i < cdf.size(); ++i)
    cdf[i] = static_cast<double>(below[i]) / static_cast<double>(trials);
  return cdf;
}

}  // namespace extdeg
