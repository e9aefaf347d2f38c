#pragma once

// Finite-horizon chaos indicators: distributional profiles, DC1/DC2 verdicts,
// scrambled-pair scans and separated-set entropy estimates.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nads/constructions.hpp"
#include "nads/rational.hpp"
#include "nads/systems.hpp"

namespace nads {

// 32 log-spaced thresholds in [1e-3, 1].
std::vector<double> default_t_grid();
// "log:K:a:b", "lin:K:a:b" or a comma list of thresholds.
std::vector<double> parse_t_grid(const std::string& spec);

// max(1, N/100).
std::size_t default_burn_in(std::size_t N);

struct DistributionalProfile {
  std::vector<double> t_grid;
  std::vector<double> psi_lower;  // min over the window of c_n(t)
  std::vector<double> psi_upper;  // max over the window of c_n(t)
  std::size_t horizon = 0;
  std::size_t burn_in = 0;  // window is n in [burn_in, horizon]
};

// c_n(t) = #{j < n : d_j < t} / n.
DistributionalProfile profile_from_series(const DistanceSeries& series, const std::vector<double>& t_grid,
                                          std::optional<std::size_t> burn_in = std::nullopt);

DistributionalProfile distributional_profile(const System& s, const Rational& x, const Rational& y, std::size_t N,
                                             const std::vector<double>& t_grid = default_t_grid(),
                                             std::optional<std::size_t> burn_in = std::nullopt);
DistributionalProfile distributional_profile(const OdometerSystem& s, const CantorPoint& x, const CantorPoint& y,
                                             std::size_t N, const std::vector<double>& t_grid = default_t_grid(),
                                             std::optional<std::size_t> burn_in = std::nullopt);

enum class Verdict { DC1, DC2_only, none, undetermined };
std::string to_string(Verdict v);

struct PairVerdict {
  std::string x, y;
  DistributionalProfile profile;
  Verdict verdict = Verdict::undetermined;
  std::optional<double> t0;  // largest t with psi_lower <= delta, for DC1
};

PairVerdict classify_pair(const DistributionalProfile& profile, double delta = 0.05);

struct ScanOptions {
  std::size_t horizon = 10'000;
  std::vector<double> t_grid = default_t_grid();
  double delta = 0.05;
  std::optional<std::size_t> burn_in;
  std::size_t jobs = 1;
};

// Results in input order regardless of jobs.
std::vector<PairVerdict> scrambled_scan(const System& s, const std::vector<std::pair<Rational, Rational>>& pairs,
                                        const ScanOptions& opt);
std::vector<PairVerdict> scrambled_scan(const OdometerSystem& s,
                                        const std::vector<std::pair<CantorPoint, CantorPoint>>& pairs,
                                        const ScanOptions& opt);

struct ScanSummary {
  std::size_t dc1 = 0, dc2_only = 0, none = 0, undetermined = 0;
};
ScanSummary summarize(const std::vector<PairVerdict>& verdicts);

// Uniform random pairs in [0,1]^2 as exact dyadic rationals (2^-32 resolution).
std::vector<std::pair<Rational, Rational>> random_pairs(std::size_t count, std::uint64_t seed);
std::vector<std::pair<CantorPoint, CantorPoint>> random_code_pairs(std::size_t count, std::size_t depth,
                                                                   std::uint64_t seed);

// ---------------------------------------------------------------- entropy

enum class SeparationMethod { grid, lap_exact };
std::string to_string(SeparationMethod m);
SeparationMethod separation_method_from_string(const std::string& s);

struct SeparationOptions {
  std::size_t grid_intervals = 10'000;  // probe grid k / grid_intervals
};

// Lower-bound estimate of the maximal (n, eps)-separated cardinality.
// grid: greedy rho_n-separated subset of the probe grid, scanned in increasing order.
// lap_exact: max over i < n of the eps-resolvable points on the eps-large laps of F_i.
std::size_t separated_set_size(const System& s, std::size_t n, const Rational& eps, SeparationMethod method,
                               const SeparationOptions& opt = {});

// Greedy separated subset of explicit orbits (orbits[p][i] = F_i(x_p), points in scan order).
std::size_t greedy_separated(const std::vector<std::vector<Rational>>& orbits, std::size_t n, const Rational& eps);
// Points counted by the lap method for a single map.
std::size_t lap_resolvable_points(const PLMap& F, const Rational& eps);

struct EntropyRow {
  std::size_t n;
  Rational eps;
  std::size_t s_n;
};

struct EntropyTable {
  SeparationMethod method = SeparationMethod::lap_exact;
  std::vector<std::size_t> n_values;
  std::vector<Rational> eps_ladder;
  // counts[e][i]: s_n at eps_ladder[e], n_values[i]; monotone envelope applied.
  std::vector<std::vector<std::size_t>> counts;
  std::vector<double> slopes;  // per eps
  double h = 0.0;

  std::vector<EntropyRow> rows() const;
};

// Least-squares slope of ln s over the longest run of strict increases (0 if none).
double growth_slope(const std::vector<std::size_t>& n_values, const std::vector<std::size_t>& s);

EntropyTable entropy_estimate(const System& s, std::size_t n_min, std::size_t n_max,
                              const std::vector<Rational>& eps_ladder, SeparationMethod method,
                              const SeparationOptions& opt = {}, std::size_t jobs = 1);

// ---------------------------------------------------------------- output

// Each writer starts with "# config: <json>" and a header row.
void write_profile_csv(std::ostream& os, const DistributionalProfile& p, const nlohmann::json& config);
void write_entropy_csv(std::ostream& os, const EntropyTable& t, const nlohmann::json& config);
void write_verdicts_csv(std::ostream& os, const std::vector<PairVerdict>& v, const nlohmann::json& config);

// Fixed-format decimal, locale independent.
std::string format_double(double v);

}  // namespace nads
