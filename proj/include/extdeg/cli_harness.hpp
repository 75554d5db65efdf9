#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "extdeg/graph_sim.hpp"
#include "extdeg/stein_bounds.hpp"

// Experiment runners behind the CLI subcommands. Every output embeds its
// manifest (subcommand, full parameter set, seed, tool version, schema
// version); reruns with the same manifest produce byte-identical files, so
// wall-clock timing is reported on stderr by the front end, never here.

namespace extdeg::cli {

inline constexpr const char* kToolVersion = "extdeg 0.1.0";

struct Manifest {
  std::string subcommand;
  std::string schema;  // e.g. "bounds.v1"
  std::vector<std::pair<std::string, std::string>> params;  // ordered
};

nlohmann::ordered_json manifest_json(const Manifest& manifest);
std::string manifest_csv_comment(const Manifest& manifest);

// Edge probability: fixed, or the schedule p(n) = n^alpha written "n^alpha"
// (e.g. "n^-0.25"). Schedule values must land in (0,1) for every n used.
struct EdgeProb {
  double fixed = 0.5;
  bool scheduled = false;
  double exponent = 0.0;

  double at(std::int64_t n) const;  // throws std::domain_error if outside (0,1)
};
EdgeProb parse_p_schedule(const std::string& text);

// A generic table: column names plus string-formatted cells (numbers are
// rendered with 12 significant digits; the JSON form keeps full doubles).
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> cells;
  std::vector<std::vector<nlohmann::ordered_json>> values;
};

std::string table_csv(const Manifest& manifest, const Table& table);
std::string table_json(const Manifest& manifest, const Table& table);

Table bounds_table(const std::vector<std::int64_t>& ns, const EdgeProb& p,
                   const std::vector<double>& ts, bool alt_centering);

Table rate_table(const std::vector<std::int64_t>& ns, const EdgeProb& p,
                 double t);

Table oracle_table(int n, double p, const std::vector<double>& ys);

// Full Monte Carlo report (JSON): W-pmf with standard errors, empirical TVD
// with block-bootstrap SE, Poisson(lambda_n) reference, per-(m,t) empirical
// extreme-CDF vs Poisson and limiting CDFs, duality violation count.
nlohmann::ordered_json simulate_report(const SimConfig& config,
                                       const std::vector<int>& ms,
                                       const std::vector<double>& t_grid);

// Same schema with i.i.d. standard normals instead of graph degrees; the
// Poisson reference uses lambda = n * normal_tail(x_n(t)).
nlohmann::ordered_json baseline_report(std::int64_t n, double t0,
                                       const std::vector<int>& ms,
                                       const std::vector<double>& t_grid,
                                       std::int64_t trials, std::uint64_t seed,
                                       int worker_hint);

std::string format_double(double v);  // %.12g, deterministic

}  // namespace extdeg::cli
