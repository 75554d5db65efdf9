#include "extdeg/cli_harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "extdeg/binom_numerics.hpp"
#include "extdeg/exact_oracle.hpp"

namespace extdeg::cli {

namespace {

constexpr int kBootstrapResamples = 200;

nlohmann::ordered_json num(double v) { return v; }

void push(Table& table, std::vector<nlohmann::ordered_json> row) {
  std::vector<std::string> cells;
  cells.reserve(row.size());
  for (const auto& v : row) {
    if (v.is_number_float())
      cells.push_back(format_double(v.get<double>()));
    else
      cells.push_back(v.dump());
  }
  table.cells.push_back(std::move(cells));
  table.values.push_back(std::move(row));
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

nlohmann::ordered_json manifest_json(const Manifest& manifest) {
  nlohmann::ordered_json j;
  j["tool"] = kToolVersion;
  j["subcommand"] = manifest.subcommand;
  j["schema"] = manifest.schema;
  nlohmann::ordered_json params;
  for (const auto& [key, value] : manifest.params) params[key] = value;
  j["params"] = params;
  return j;
}

std::string manifest_csv_comment(const Manifest& manifest) {
  std::ostringstream out;
  out << "# tool: " << kToolVersion << "\n";
  out << "# subcommand: " << manifest.subcommand << "\n";
  out << "# schema: " << manifest.schema << "\n";
  for (const auto& [key, value] : manifest.params)
    out << "# " << key << ": " << value << "\n";
  return out.str();
}

double EdgeProb::at(std::int64_t n) const {
  const double value = scheduled ? std::pow(static_cast<double>(n), exponent) : fixed;
  if (!(value > 0.0 && value < 1.0))
    throw std::domain_error("edge probability outside (0,1) at n=" + std::to_string(n));
  return value;
}

EdgeProb parse_p_schedule(const std::string& text) {
  EdgeProb p;
  p.scheduled = true;
  const char* usage = "p schedule must have the form n^<exponent>, e.g. n^-0.25";
  if (text.rfind("n^", 0) != 0) throw std::domain_error(usage);
  std::size_t used = 0;
  try {
    p.exponent = std::stod(text.substr(2), &used);
  } catch (const std::exception&) {
    throw std::domain_error(usage);
  }
  if (used != text.size() - 2) throw std::domain_error(usage);
  return p;
}

std::string table_csv(const Manifest& manifest, const Table& table) {
  std::ostringstream out;
  out << manifest_csv_comment(manifest);
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    out << (c ? "," : "") << table.columns[c];
  out << "\n";
  for (const auto& row : table.cells) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << "\n";
  }
  return out.str();
}

std::string table_json(const Manifest& manifest, const Table& table) {
  nlohmann::ordered_json j;
  j["manifest"] = manifest_json(manifest);
  j["columns"] = table.columns;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : table.values) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (const auto& v : row) r.push_back(v);
    rows.push_back(r);
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

Table bounds_table(const std::vector<std::int64_t>& ns, const EdgeProb& p,
                   const std::vector<double>& ts, bool alt_centering) {
  Table table;
  table.columns = {"n",         "p",          "t",         "npq_warn",
                   "a_n",       "b_n",        "x_n",       "y",
                   "pi1",       "lambda",     "cov_exact", "cov_asym",
                   "cov_ratio", "utvd_exact", "utvd_asym", "utvd_ratio",
                   "degenerate"};
  if (alt_centering) table.columns.push_back("y_np_centering");
  for (const std::int64_t n : ns) {
    for (const double t : ts) {
      ModelParams params{n, p.at(n), t, 1};
      const BoundReport r = bound_report(params);
      std::vector<nlohmann::ordered_json> row = {
          n,
          num(params.p),
          num(t),
          r.low_npq ? 1 : 0,
          num(r.a_n),
          num(r.b_n),
          num(r.x_n),
          num(r.y),
          num(r.pi1),
          num(r.lambda),
          num(r.cov_exact),
          num(r.cov_asym),
          num(r.cov_exact / r.cov_asym),
          num(r.utvd_exact),
          num(r.utvd_asym),
          num(r.utvd_exact / r.utvd_asym),
          r.degenerate ? 1 : 0};
      if (alt_centering) {
        const double nd = static_cast<double>(n);
        row.push_back(num(nd * params.p +
                          r.x_n * std::sqrt(nd * params.p * (1.0 - params.p))));
      }
      push(table, std::move(row));
    }
  }
  return table;
}

Table rate_table(const std::vector<std::int64_t>& ns, const EdgeProb& p, double t) {
  Table table;
  table.columns = {"n",          "p",          "t",
                   "utvd_exact", "utvd_asym",  "utvd_ratio",
                   "n_pi1_exp_t","dev_lambda", "pi1_over_normal_tail",
                   "dev_tail",   "cramer_x",   "x_n",
                   "cramer_gap"};
  for (const std::int64_t n : ns) {
    ModelParams params{n, p.at(n), t, 1};
    const BoundReport r = bound_report(params);
    const double n_pi1_exp_t = static_cast<double>(n) * r.pi1 * std::exp(t);
    const double tail_ratio = r.pi1 / normal_tail(r.x_n);
    const double cramer_x = cramer_threshold(n, std::exp(-t));
    push(table, {n, num(params.p), num(t), num(r.utvd_exact), num(r.utvd_asym),
                 num(r.utvd_exact / r.utvd_asym), num(n_pi1_exp_t),
                 num(std::fabs(n_pi1_exp_t - 1.0)), num(tail_ratio),
                 num(std::fabs(tail_ratio - 1.0)), num(cramer_x), num(r.x_n),
                 num(std::fabs(cramer_x - r.x_n))});
  }
  return table;
}

Table oracle_table(int n, double p, const std::vector<double>& ys) {
  Table table;
  table.columns = {"y", "pi1_oracle", "lambda_oracle"};
  for (int k = 0; k <= n; ++k) table.columns.push_back("pmf_" + std::to_string(k));
  for (const char* name :
       {"cov_oracle", "cov_closed", "cov_abs_delta", "tvd_oracle", "utvd_exact",
        "tvd_le_bound", "m1_lower", "m1_exact", "m1_upper", "m1_bracketed",
        "m2_lower", "m2_exact", "m2_upper", "m2_bracketed"})
    table.columns.push_back(name);

  for (const double y : ys) {
    const oracle::OraclePmf pmf = oracle::enumerate_wn_pmf(n, p, y);
    const double pi_oracle = oracle::exact_pi1(n, p, y);
    const double cov_oracle = oracle::exact_cov(n, p, y);
    const double cov_closed = cov_exact(n, p, y);
    const double tvd_oracle = oracle::exact_tvd_to_poisson(n, p, y);
    const double bound = utvd_exact_at(n, p, y);

    std::vector<nlohmann::ordered_json> row = {num(y), num(pi_oracle),
                                               num(n * pi_oracle)};
    for (int k = 0; k <= n; ++k) row.push_back(num(pmf.probs[static_cast<std::size_t>(k)]));
    row.push_back(num(cov_oracle));
    row.push_back(num(cov_closed));
    row.push_back(num(std::fabs(cov_oracle - cov_closed)));
    row.push_back(num(tvd_oracle));
    row.push_back(num(bound));
    row.push_back(tvd_oracle <= bound ? 1 : 0);
    const double K = std::floor(y) + 1.0;
    for (int r = 1; r <= 2; ++r) {
      const auto [lower, upper] = moment_bounds(n, p, r, K);
      const double exact = oracle::exact_moment(n, p, y, r);
      row.push_back(num(lower));
      row.push_back(num(exact));
      row.push_back(num(upper));
      // ties (lower == exact) are legitimate; allow rounding noise
      row.push_back(lower <= exact + 1e-12 && exact <= upper + 1e-12 ? 1 : 0);
    }
    push(table, std::move(row));
  }
  return table;
}

namespace {

nlohmann::ordered_json pmf_section(const EmpiricalPmf& pmf) {
  nlohmann::ordered_json j;
  j["trials"] = pmf.trials;
  j["counts"] = pmf.counts;
  nlohmann::ordered_json phat = nlohmann::ordered_json::array();
  nlohmann::ordered_json se = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < pmf.counts.size(); ++k) {
    phat.push_back(pmf.phat(k));
    se.push_back(pmf.std_error(k));
  }
  j["phat"] = phat;
  j["std_error"] = se;
  return j;
}

nlohmann::ordered_json poisson_section(double lambda, std::size_t width) {
  nlohmann::ordered_json j;
  j["lambda"] = lambda;
  nlohmann::ordered_json pmf = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < width; ++k)
    pmf.push_back(poisson_pmf(lambda, static_cast<std::int64_t>(k)));
  j["pmf"] = pmf;
  j["tail_beyond"] = poisson_tail(lambda, static_cast<std::int64_t>(width) - 1);
  return j;
}

}  // namespace

nlohmann::ordered_json simulate_report(const SimConfig& config,
                                       const std::vector<int>& ms,
                                       const std::vector<double>& t_grid) {
  const SimReport sim = run_simulation(config, ms, t_grid);
  const BoundReport bounds = bound_report(config.params);

  nlohmann::ordered_json j;
  nlohmann::ordered_json model;
  model["n"] = config.params.n;
  model["p"] = config.params.p;
  model["t"] = config.params.t;
  model["a_n"] = bounds.a_n;
  model["b_n"] = bounds.b_n;
  model["x_n"] = bounds.x_n;
  model["y"] = bounds.y;
  model["pi1"] = bounds.pi1;
  model["lambda"] = bounds.lambda;
  model["utvd_exact"] = bounds.utvd_exact;
  model["utvd_asym"] = bounds.utvd_asym;
  j["model"] = model;

  j["w_pmf"] = pmf_section(sim.w_pmf);
  j["poisson_ref"] = poisson_section(bounds.lambda, sim.w_pmf.counts.size());

  nlohmann::ordered_json tvd;
  tvd["empirical"] = empirical_tvd(sim.w_pmf, bounds.lambda);
  tvd["bootstrap_se"] =
      tvd_bootstrap_se(sim.w_pmf, bounds.lambda, kBootstrapResamples, config.seed);
  tvd["blocks"] = static_cast<int>(sim.w_pmf.block_counts.size());
  tvd["resamples"] = kBootstrapResamples;
  tvd["bound_exact"] = bounds.utvd_exact;
  j["tvd"] = tvd;

  nlohmann::ordered_json extreme = nlohmann::ordered_json::array();
  for (std::size_t mi = 0; mi < ms.size(); ++mi) {
    nlohmann::ordered_json entry;
    entry["m"] = ms[mi];
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
      ModelParams at_t = config.params;
      at_t.t = t_grid[ti];
      const BoundReport rb = bound_report(at_t);
      nlohmann::ordered_json point;
      point["t"] = t_grid[ti];
      point["y"] = rb.y;
      point["empirical"] = sim.extreme_cdf[mi][ti];
      point["poisson_cdf"] = poisson_cdf(rb.lambda, ms[mi] - 1);
      point["limit_cdf"] = limit_cdf(ms[mi], t_grid[ti]);
      rows.push_back(point);
    }
    entry["points"] = rows;
    extreme.push_back(entry);
  }
  j["extreme_cdf"] = extreme;
  j["duality_violations"] = sim.duality_violations;
  return j;
}

nlohmann::ordered_json baseline_report(std::int64_t n, double t0,
                                       const std::vector<int>& ms,
                                       const std::vector<double>& t_grid,
                                       std::int64_t trials, std::uint64_t seed,
                                       int worker_hint) {
  (void)worker_hint;  // baseline runs are cheap; sequential by design
  const auto [a, b] = normalization(n);
  const double x0 = a * t0 + b;
  const double lambda = static_cast<double>(n) * normal_tail(x0);

  // exceedance pmf of #{xi_i > x_n(t0)} plus order-statistic CDFs, with
  // the duality check mirroring the degree pipeline
  std::vector<double> x_grid(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) x_grid[i] = a * t_grid[i] + b;

  EmpiricalPmf pmf;
  pmf.trials = trials;
  pmf.counts.assign(1, 0);
  const int blocks = static_cast<int>(std::min<std::int64_t>(kBootstrapBlocks, trials));
  pmf.block_counts.assign(static_cast<std::size_t>(blocks), {});
  pmf.block_trials.assign(static_cast<std::size_t>(blocks), 0);

  std::vector<std::vector<std::uint64_t>> below(
      ms.size(), std::vector<std::uint64_t>(t_grid.size(), 0));
  std::int64_t violations = 0;
  std::vector<double> values(static_cast<std::size_t>(n));
  std::vector<double> order_stats(ms.size());
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    Philox rng(seed, kBaselineTrialStream + static_cast<std::uint64_t>(trial));
    for (auto& v : values) v = rng.next_normal();

    std::int64_t w0 = 0;
    for (const double v : values) w0 += v > x0 ? 1 : 0;
    const std::size_t k = static_cast<std::size_t>(w0);
    if (k >= pmf.counts.size()) pmf.counts.resize(k + 1, 0);
    ++pmf.counts[k];
    const int blk = static_cast<int>(trial * blocks / trials);
    auto& bc = pmf.block_counts[static_cast<std::size_t>(blk)];
    if (k >= bc.size()) bc.resize(k + 1, 0);
    ++bc[k];
    ++pmf.block_trials[static_cast<std::size_t>(blk)];

    std::vector<double> scratch = values;
    for (std::size_t mi = 0; mi < ms.size(); ++mi) {
      std::nth_element(scratch.begin(), scratch.begin() + (ms[mi] - 1),
                       scratch.end(), std::greater<>());
      order_stats[mi] = scratch[static_cast<std::size_t>(ms[mi] - 1)];
    }
    for (std::size_t ti = 0; ti < x_grid.size(); ++ti) {
      std::int64_t w_t = 0;
      for (const double v : values) w_t += v > x_grid[ti] ? 1 : 0;
      for (std::size_t mi = 0; mi < ms.size(); ++mi) {
        const bool is_below = order_stats[mi] <= x_grid[ti];
        if (is_below) ++below[mi][ti];
        if (is_below != (w_t <= ms[mi] - 1)) ++violations;
      }
    }
  }
  for (auto& bc : pmf.block_counts) bc.resize(pmf.counts.size(), 0);

  nlohmann::ordered_json j;
  nlohmann::ordered_json model;
  model["n"] = n;
  model["t"] = t0;
  model["a_n"] = a;
  model["b_n"] = b;
  model["x_n"] = x0;
  model["lambda"] = lambda;
  j["model"] = model;
  j["w_pmf"] = pmf_section(pmf);
  j["poisson_ref"] = poisson_section(lambda, pmf.counts.size());

  nlohmann::ordered_json tvd;
  tvd["empirical"] = empirical_tvd(pmf, lambda);
  tvd["bootstrap_se"] = tvd_bootstrap_se(pmf, lambda, kBootstrapResamples, seed);
  tvd["blocks"] = blocks;
  tvd["resamples"] = kBootstrapResamples;
  j["tvd"] = tvd;

  nlohmann::ordered_json extreme = nlohmann::ordered_json::array();
  for (std::size_t mi = 0; mi < ms.size(); ++mi) {
    nlohmann::ordered_json entry;
    entry["m"] = ms[mi];
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
      nlohmann::ordered_json point;
      point["t"] = t_grid[ti];
      point["x_n"] = x_grid[ti];
      point["empirical"] = static_cast<double>(below[mi][ti]) /
                           static_cast<double>(trials);
      point["poisson_cdf"] =
          poisson_cdf(static_cast<double>(n) * normal_tail(x_grid[ti]), ms[mi] - 1);
      point["limit_cdf"] = limit_cdf(ms[mi], t_grid[ti]);
      rows.push_back(point);
    }
    entry["points"] = rows;
    extreme.push_back(entry);
  }
  j["extreme_cdf"] = extreme;
  j["duality_violations"] = violations;
  return j;
}

}  // namespace extdeg::cli
