#include "nads/chaos.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

#include "nads/parallel.hpp"

namespace nads {

namespace {

std::vector<double> spaced_grid(bool logarithmic, std::size_t k, double a, double b) {
  if (k < 2) throw InvalidInput("t-grid needs at least two points");
  if (!(a > 0) || !(b <= 1) || !(a < b)) throw InvalidInput("t-grid bounds must satisfy 0 < a < b <= 1");
  std::vector<double> g(k);
  for (std::size_t i = 0; i < k; ++i) {
    double f = static_cast<double>(i) / static_cast<double>(k - 1);
    g[i] = logarithmic ? a * std::pow(b / a, f) : a + (b - a) * f;
  }
  g.back() = b;
  return g;
}

double parse_double(const std::string& s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw InvalidInput("bad number: " + s);
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

struct Fit {
  double slope = 0.0;
  std::size_t points = 0;
};

Fit fit_growth(const std::vector<std::size_t>& n_values, const std::vector<std::size_t>& s) {
  std::size_t best_start = 0, best_len = 1;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= s.size(); ++i) {
    if (i == s.size() || !(s[i] > s[i - 1])) {
      std::size_t len = i - start;
      if (len >= best_len) {
        best_len = len;
        best_start = start;
      }
      start = i;
    }
  }
  if (s.empty() || best_len < 2) return {0.0, best_len};
  double mx = 0, my = 0;
  for (std::size_t i = best_start; i < best_start + best_len; ++i) {
    mx += static_cast<double>(n_values[i]);
    my += std::log(static_cast<double>(s[i]));
  }
  mx /= static_cast<double>(best_len);
  my /= static_cast<double>(best_len);
  double sxy = 0, sxx = 0;
  for (std::size_t i = best_start; i < best_start + best_len; ++i) {
    double dx = static_cast<double>(n_values[i]) - mx;
    sxy += dx * (std::log(static_cast<double>(s[i])) - my);
    sxx += dx * dx;
  }
  return {sxy / sxx, best_len};
}

void check_eps(const Rational& eps) {
  if (eps <= 0) throw InvalidInput("eps must be positive");
}

}  // namespace

std::vector<double> default_t_grid() { return spaced_grid(true, 32, 1e-3, 1.0); }

std::vector<double> parse_t_grid(const std::string& spec) {
  if (spec.rfind("log:", 0) == 0 || spec.rfind("lin:", 0) == 0) {
    auto parts = split(spec, ':');
    if (parts.size() != 4) throw InvalidInput("t-grid spec must be log:K:a:b or lin:K:a:b");
    double k = parse_double(parts[1]);
    if (k != std::floor(k) || k < 2 || k > 1e6) throw InvalidInput("bad t-grid size: " + parts[1]);
    return spaced_grid(parts[0] == "log", static_cast<std::size_t>(k), parse_double(parts[2]),
                       parse_double(parts[3]));
  }
  std::vector<double> g;
  for (const auto& p : split(spec, ',')) {
    double t = parse_double(p);
    if (!(t > 0) || t > 1) throw InvalidInput("thresholds must lie in (0,1]");
    g.push_back(t);
  }
  if (g.empty()) throw InvalidInput("empty t-grid");
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

std::size_t default_burn_in(std::size_t N) { return std::max<std::size_t>(1, N / 100); }

DistributionalProfile profile_from_series(const DistanceSeries& series, const std::vector<double>& t_grid,
                                          std::optional<std::size_t> burn_in) {
  const std::size_t N = series.horizon();
  std::size_t b = burn_in.value_or(default_burn_in(N));
  if (N < 2) throw InvalidInput("horizon too small: need at least 2 steps");
  if (b == 0 || b >= N) throw InvalidInput("horizon too small for the burn-in window");
  if (t_grid.empty()) throw InvalidInput("empty t-grid");

  DistributionalProfile p{t_grid, {}, {}, N, b};
  p.psi_lower.reserve(t_grid.size());
  p.psi_upper.reserve(t_grid.size());
  for (double t : t_grid) {
    std::size_t count = 0;
    double lo = 1.0, hi = 0.0;
    for (std::size_t n = 1; n <= N; ++n) {
      if (series.values[n - 1] < t) ++count;
      if (n >= b) {
        double c = static_cast<double>(count) / static_cast<double>(n);
        lo = std::min(lo, c);
        hi = std::max(hi, c);
      }
    }
    p.psi_lower.push_back(lo);
    p.psi_upper.push_back(hi);
  }
  return p;
}

DistributionalProfile distributional_profile(const System& s, const Rational& x, const Rational& y, std::size_t N,
                                             const std::vector<double>& t_grid, std::optional<std::size_t> burn_in) {
  if (N < 2) throw InvalidInput("horizon too small: need at least 2 steps");
  return profile_from_series(distance_series(s, x, y, N), t_grid, burn_in);
}

DistributionalProfile distributional_profile(const OdometerSystem& s, const CantorPoint& x, const CantorPoint& y,
                                             std::size_t N, const std::vector<double>& t_grid,
                                             std::optional<std::size_t> burn_in) {
  if (N < 2) throw InvalidInput("horizon too small: need at least 2 steps");
  return profile_from_series(distance_series(s, x, y, N), t_grid, burn_in);
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::DC1: return "DC1";
    case Verdict::DC2_only: return "DC2_only";
    case Verdict::none: return "none";
    case Verdict::undetermined: return "undetermined";
  }
  return "undetermined";
}

PairVerdict classify_pair(const DistributionalProfile& p, double delta) {
  PairVerdict v;
  v.profile = p;
  bool upper_full = true, spread_all = true, spread_none = true;
  for (std::size_t i = 0; i < p.t_grid.size(); ++i) {
    double spread = p.psi_upper[i] - p.psi_lower[i];
    upper_full = upper_full && p.psi_upper[i] >= 1.0 - delta;
    spread_all = spread_all && spread >= delta;
    spread_none = spread_none && spread < delta;
    if (p.psi_lower[i] <= delta) v.t0 = p.t_grid[i];
  }
  if (upper_full && v.t0) {
    v.verdict = Verdict::DC1;
    return v;
  }
  v.t0.reset();
  if (upper_full && spread_all)
    v.verdict = Verdict::DC2_only;
  else if (spread_none)
    v.verdict = Verdict::none;
  else
    v.verdict = Verdict::undetermined;
  return v;
}

std::vector<PairVerdict> scrambled_scan(const System& s, const std::vector<std::pair<Rational, Rational>>& pairs,
                                        const ScanOptions& opt) {
  std::vector<PairVerdict> out(pairs.size());
  parallel_for(pairs.size(), opt.jobs, [&](std::size_t i) {
    auto series = distance_series(s, pairs[i].first, pairs[i].second, opt.horizon);
    auto v = classify_pair(profile_from_series(series, opt.t_grid, opt.burn_in), opt.delta);
    v.x = series.x;
    v.y = series.y;
    out[i] = std::move(v);
  });
  return out;
}

std::vector<PairVerdict> scrambled_scan(const OdometerSystem& s,
                                        const std::vector<std::pair<CantorPoint, CantorPoint>>& pairs,
                                        const ScanOptions& opt) {
  std::vector<PairVerdict> out(pairs.size());
  parallel_for(pairs.size(), opt.jobs, [&](std::size_t i) {
    auto series = distance_series(s, pairs[i].first, pairs[i].second, opt.horizon);
    auto v = classify_pair(profile_from_series(series, opt.t_grid, opt.burn_in), opt.delta);
    v.x = series.x;
    v.y = series.y;
    out[i] = std::move(v);
  });
  return out;
}

ScanSummary summarize(const std::vector<PairVerdict>& verdicts) {
  ScanSummary s;
  for (const auto& v : verdicts) {
    switch (v.verdict) {
      case Verdict::DC1: ++s.dc1; break;
      case Verdict::DC2_only: ++s.dc2_only; break;
      case Verdict::none: ++s.none; break;
      case Verdict::undetermined: ++s.undetermined; break;
    }
  }
  return s;
}

std::vector<std::pair<Rational, Rational>> random_pairs(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto draw = [&] {
    Rational r(Integer(static_cast<unsigned long>(rng() >> 32)));
    mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), 32);
    return r;
  };
  std::vector<std::pair<Rational, Rational>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rational x = draw();
    Rational y = draw();
    out.emplace_back(std::move(x), std::move(y));
  }
  return out;
}

std::vector<std::pair<CantorPoint, CantorPoint>> random_code_pairs(std::size_t count, std::size_t depth,
                                                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<CantorPoint, CantorPoint>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    CantorPoint x = CantorPoint::random(depth, rng);
    CantorPoint y = CantorPoint::random(depth, rng);
    out.emplace_back(std::move(x), std::move(y));
  }
  return out;
}

// ---------------------------------------------------------------- entropy

std::string to_string(SeparationMethod m) { return m == SeparationMethod::grid ? "grid" : "lap_exact"; }

SeparationMethod separation_method_from_string(const std::string& s) {
  if (s == "grid") return SeparationMethod::grid;
  if (s == "lap_exact") return SeparationMethod::lap_exact;
  throw InvalidInput("method must be grid or lap_exact, got " + s);
}

std::size_t greedy_separated(const std::vector<std::vector<Rational>>& orbits, std::size_t n, const Rational& eps) {
  check_eps(eps);
  const double e = to_double(eps);
  constexpr double kSlack = 1e-12;
  std::vector<std::vector<double>> d(orbits.size());
  for (std::size_t p = 0; p < orbits.size(); ++p) {
    if (orbits[p].size() < n) throw InvalidInput("orbit shorter than n");
    d[p].reserve(n);
    for (std::size_t i = 0; i < n; ++i) d[p].push_back(orbits[p][i].get_d());
  }
  auto separated = [&](std::size_t p, std::size_t q) {
    for (std::size_t i = 0; i < n; ++i) {
      double gap = std::abs(d[p][i] - d[q][i]);
      if (gap > e + kSlack) return true;
      if (gap >= e - kSlack && abs(Rational(orbits[p][i] - orbits[q][i])) > eps) return true;
    }
    return false;
  };
  std::vector<std::size_t> chosen;
  for (std::size_t p = 0; p < orbits.size(); ++p) {
    bool ok = true;
    for (std::size_t q : chosen) {
      if (!separated(p, q)) {
        ok = false;
        break;
      }
    }
    if (ok) chosen.push_back(p);
  }
  return chosen.size();
}

std::size_t lap_resolvable_points(const PLMap& F, const Rational& eps) {
  check_eps(eps);
  auto ls = laps(F);
  std::size_t total = 0;
  bool prev = false;
  for (const auto& lap : ls) {
    Rational D = lap.diameter();
    bool q = D > eps;
    if (q) {
      total += static_cast<std::size_t>(ceil(Rational(D / eps)).get_ui());
      if (prev) --total;
    }
    prev = q;
  }
  return std::max<std::size_t>(total, 1);
}

namespace {

std::vector<std::vector<Rational>> grid_orbits(const System& s, std::size_t n, const SeparationOptions& opt,
                                               std::size_t jobs) {
  auto grid = uniform_grid(opt.grid_intervals);
  std::vector<std::vector<Rational>> orbits(grid.size());
  parallel_for(grid.size(), jobs, [&](std::size_t p) { orbits[p] = orbit(s, grid[p], n); });
  return orbits;
}

}  // namespace

std::size_t separated_set_size(const System& s, std::size_t n, const Rational& eps, SeparationMethod method,
                               const SeparationOptions& opt) {
  if (n == 0) throw InvalidInput("n must be at least 1");
  check_eps(eps);
  if (method == SeparationMethod::grid) return greedy_separated(grid_orbits(s, n, opt, 1), n, eps);
  auto F = prefix_compositions(s, n - 1);
  std::size_t best = 0;
  for (const auto& Fi : F) best = std::max(best, lap_resolvable_points(Fi, eps));
  return best;
}

double growth_slope(const std::vector<std::size_t>& n_values, const std::vector<std::size_t>& s) {
  if (n_values.size() != s.size()) throw InvalidInput("size mismatch");
  return fit_growth(n_values, s).slope;
}

std::vector<EntropyRow> EntropyTable::rows() const {
  std::vector<EntropyRow> out;
  for (std::size_t e = 0; e < eps_ladder.size(); ++e)
    for (std::size_t i = 0; i < n_values.size(); ++i) out.push_back({n_values[i], eps_ladder[e], counts[e][i]});
  return out;
}

EntropyTable entropy_estimate(const System& s, std::size_t n_min, std::size_t n_max,
                              const std::vector<Rational>& eps_ladder, SeparationMethod method,
                              const SeparationOptions& opt, std::size_t jobs) {
  if (n_min == 0 || n_max < n_min) throw InvalidInput("bad n range");
  if (eps_ladder.empty()) throw InvalidInput("empty eps ladder");
  for (const auto& e : eps_ladder) check_eps(e);

  EntropyTable t;
  t.method = method;
  t.eps_ladder = eps_ladder;
  for (std::size_t n = n_min; n <= n_max; ++n) t.n_values.push_back(n);
  t.counts.assign(eps_ladder.size(), std::vector<std::size_t>(t.n_values.size(), 0));

  // raw[e][n-1] for n = 1..n_max
  std::vector<std::vector<std::size_t>> raw(eps_ladder.size(), std::vector<std::size_t>(n_max, 0));
  if (method == SeparationMethod::lap_exact) {
    auto F = prefix_compositions(s, n_max - 1);
    parallel_for(eps_ladder.size(), jobs, [&](std::size_t e) {
      std::size_t best = 0;
      for (std::size_t i = 0; i < n_max; ++i) {
        best = std::max(best, lap_resolvable_points(F[i], eps_ladder[e]));
        raw[e][i] = best;
      }
    });
  } else {
    auto orbits = grid_orbits(s, n_max, opt, jobs);
    std::vector<std::pair<std::size_t, std::size_t>> items;
    for (std::size_t e = 0; e < eps_ladder.size(); ++e)
      for (std::size_t n = n_min; n <= n_max; ++n) items.emplace_back(e, n);
    parallel_for(items.size(), jobs, [&](std::size_t k) {
      auto [e, n] = items[k];
      raw[e][n - 1] = greedy_separated(orbits, n, eps_ladder[e]);
    });
  }

  // Monotone envelope: nondecreasing in n, nonincreasing in eps.
  for (std::size_t e = 0; e < eps_ladder.size(); ++e) {
    std::size_t run = 0;
    for (std::size_t i = 0; i < t.n_values.size(); ++i) {
      std::size_t n = t.n_values[i];
      run = std::max(run, raw[e][n - 1]);
      t.counts[e][i] = run;
    }
  }
  auto env = t.counts;
  for (std::size_t e = 0; e < eps_ladder.size(); ++e)
    for (std::size_t f = 0; f < eps_ladder.size(); ++f)
      if (eps_ladder[f] >= eps_ladder[e])
        for (std::size_t i = 0; i < t.n_values.size(); ++i) env[e][i] = std::max(env[e][i], t.counts[f][i]);
  t.counts = std::move(env);

  std::optional<std::size_t> finest;
  for (std::size_t e = 0; e < eps_ladder.size(); ++e) {
    Fit fit = fit_growth(t.n_values, t.counts[e]);
    t.slopes.push_back(fit.slope);
    if (fit.points >= 3 && (!finest || eps_ladder[e] < eps_ladder[*finest])) finest = e;
  }
  t.h = finest ? t.slopes[*finest] : 0.0;
  return t;
}

// ---------------------------------------------------------------- output

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, p);
}

void write_profile_csv(std::ostream& os, const DistributionalProfile& p, const nlohmann::json& config) {
  os << "# config: " << config.dump() << '\n';
  os << "t,psi_lower,psi_upper\n";
  for (std::size_t i = 0; i < p.t_grid.size(); ++i)
    os << format_double(p.t_grid[i]) << ',' << format_double(p.psi_lower[i]) << ','
       << format_double(p.psi_upper[i]) << '\n';
}

void write_entropy_csv(std::ostream& os, const EntropyTable& t, const nlohmann::json& config) {
  os << "# config: " << config.dump() << '\n';
  os << "n,eps,s_n,method,slope\n";
  for (std::size_t e = 0; e < t.eps_ladder.size(); ++e)
    for (std::size_t i = 0; i < t.n_values.size(); ++i)
      os << t.n_values[i] << ',' << format_double(to_double(t.eps_ladder[e])) << ',' << t.counts[e][i] << ','
         << to_string(t.method) << ',' << format_double(t.slopes[e]) << '\n';
}

void write_verdicts_csv(std::ostream& os, const std::vector<PairVerdict>& v, const nlohmann::json& config) {
  os << "# config: " << config.dump() << '\n';
  os << "x,y,verdict,t0\n";
  for (const auto& p : v)
    os << p.x << ',' << p.y << ',' << to_string(p.verdict) << ',' << (p.t0 ? format_double(*p.t0) : "") << '\n';
}

}  // namespace nads
