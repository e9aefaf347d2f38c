#include "nads/systems.hpp"

#include <algorithm>
#include <iostream>
#include <sstream>

namespace nads {

namespace {

std::mutex g_warn_mu;
WarningHandler g_warn = [](const std::string& m) { std::cerr << "warning: " << m << '\n'; };

// Members up to this size are memoised.
constexpr std::size_t kCacheLimit = 200'000;

std::string decimal(const Rational& r) {
  std::ostringstream os;
  os.precision(17);
  os << to_double(r);
  return os.str();
}

}  // namespace

std::string to_string(Surjectivity s) { return s == Surjectivity::require ? "require" : "warn"; }

Surjectivity surjectivity_from_string(const std::string& s) {
  if (s == "require") return Surjectivity::require;
  if (s == "warn") return Surjectivity::warn;
  throw InvalidInput("surjectivity must be \"require\" or \"warn\", got " + s);
}

void set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(g_warn_mu);
  g_warn = std::move(handler);
}

void emit_warning(const std::string& message) {
  std::lock_guard lock(g_warn_mu);
  if (g_warn) g_warn(message);
}

PLMap Rule::member(std::size_t n) const {
  if (n == 0) throw InvalidInput("system members are indexed from 1");
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(n); it != cache_.end()) return it->second;
  }
  PLMap m = build(n);
  if (m.size() <= kCacheLimit) {
    std::lock_guard lock(mu_);
    cache_.emplace(n, m);
  }
  return m;
}

Rational Rule::apply(std::size_t n, const Rational& x) const { return member(n)(x); }

std::vector<Breakpoint> Rule::restrict(std::size_t n, const Rational& lo, const Rational& hi) const {
  return slice(member(n), lo, hi);
}

Rational Rule::max_slope(std::size_t n) const { return max_abs_slope(member(n)); }

Rational Rule::abs_integral_against(std::size_t n, std::span<const Breakpoint> g) const {
  auto mine = restrict(n, g.front().x, g.back().x);
  return abs_integral(mine, g);
}

nlohmann::json ConstantRule::to_json() const { return {{"kind", "constant"}, {"map", nads::to_json(map_)}}; }

Rational ListThenConstantRule::apply(std::size_t n, const Rational& x) const {
  if (n == 0) throw InvalidInput("system members are indexed from 1");
  return n <= head_.size() ? head_[n - 1](x) : tail_(x);
}

PLMap ListThenConstantRule::build(std::size_t n) const { return n <= head_.size() ? head_[n - 1] : tail_; }

nlohmann::json ListThenConstantRule::to_json() const {
  auto maps = nlohmann::json::array();
  for (const auto& m : head_) maps.push_back(nads::to_json(m));
  return {{"kind", "list_then_constant"}, {"maps", maps}, {"tail", nads::to_json(tail_)}};
}

System::System(RulePtr rule, Surjectivity policy) : rule_(std::move(rule)), policy_(policy) {
  if (!rule_) throw InvalidInput("null rule");
  limit_ = rule_->natural_limit();
}

System::System(RulePtr rule, std::optional<PLMap> limit, Surjectivity policy)
    : rule_(std::move(rule)), limit_(std::move(limit)), policy_(policy) {
  if (!rule_) throw InvalidInput("null rule");
}

PLMap System::member(std::size_t n) const {
  PLMap m = rule_->member(n);
  if (!is_surjective(m)) {
    std::string msg = "member " + std::to_string(n) + " of " + rule_->kind() + " system is not surjective";
    if (policy_ == Surjectivity::require) throw InvalidInput(msg);
    emit_warning(msg);
  }
  return m;
}

Rational System::apply(std::size_t n, const Rational& x) const { return rule_->apply(n, x); }

std::optional<Rational> System::tail_bound(std::size_t n) const {
  if (!limit_) return std::nullopt;
  if (auto c = rule_->constant_from()) {
    Rational worst = 0;
    for (std::size_t m = n; m <= std::max(n, *c); ++m) worst = std::max(worst, sup_dist(rule_->member(m), *limit_));
    return worst;
  }
  auto natural = rule_->natural_limit();
  if (natural && *natural == *limit_) return rule_->declared_rate(n);
  return std::nullopt;
}

System constant_system(PLMap map, Surjectivity policy) {
  return System(std::make_shared<ConstantRule>(std::move(map)), policy);
}

System list_then_constant_system(std::vector<PLMap> head, PLMap tail, Surjectivity policy) {
  return System(std::make_shared<ListThenConstantRule>(std::move(head), std::move(tail)), policy);
}

nlohmann::json to_json(const System& s) {
  return {{"rule", s.rule().to_json()},
          {"limit", s.limit() ? to_json(*s.limit()) : nlohmann::json(nullptr)},
          {"space", "interval"},
          {"surjectivity", to_string(s.surjectivity())}};
}

PLMap prefix_composition(const System& s, std::size_t n) {
  PLMap f;
  for (std::size_t i = 1; i <= n; ++i) {
    try {
      f = compose(s.member(i), f);
    } catch (const BudgetExceeded& e) {
      throw BudgetExceeded(e.requested(), e.budget(), i);
    }
  }
  return f;
}

std::vector<PLMap> prefix_compositions(const System& s, std::size_t n) {
  std::vector<PLMap> out;
  out.reserve(n + 1);
  out.emplace_back();
  for (std::size_t i = 1; i <= n; ++i) {
    try {
      out.push_back(compose(s.member(i), out.back()));
    } catch (const BudgetExceeded& e) {
      throw BudgetExceeded(e.requested(), e.budget(), i);
    }
  }
  return out;
}

Rational iterate_point(const System& s, Rational x, std::size_t n) {
  if (x < 0 || x > 1) throw InvalidInput("point outside [0,1]");
  for (std::size_t i = 1; i <= n; ++i) x = s.apply(i, x);
  return x;
}

std::vector<Rational> orbit(const System& s, const Rational& x, std::size_t N) {
  if (x < 0 || x > 1) throw InvalidInput("point outside [0,1]");
  std::vector<Rational> out;
  out.reserve(N);
  if (N == 0) return out;
  out.push_back(x);
  for (std::size_t j = 1; j < N; ++j) out.push_back(s.apply(j, out.back()));
  return out;
}

Rational rho_n(const System& s, const Rational& x, const Rational& y, std::size_t n) {
  if (n == 0) throw InvalidInput("rho_n needs n >= 1");
  Rational a = x, b = y, best = abs(Rational(x - y));
  for (std::size_t i = 1; i < n; ++i) {
    a = s.apply(i, a);
    b = s.apply(i, b);
    Rational d = abs(Rational(a - b));
    if (d > best) best = d;
  }
  return best;
}

DistanceSeries distance_series(const System& s, const Rational& x, const Rational& y, std::size_t N) {
  if (x < 0 || x > 1 || y < 0 || y > 1) throw InvalidInput("point outside [0,1]");
  DistanceSeries out{decimal(x), decimal(y), {}};
  out.values.reserve(N);
  Rational a = x, b = y, d;
  for (std::size_t j = 0; j < N; ++j) {
    if (j) {
      a = s.apply(j, a);
      b = s.apply(j, b);
    }
    mpq_sub(d.get_mpq_t(), a.get_mpq_t(), b.get_mpq_t());
    out.values.push_back(std::abs(d.get_d()));
  }
  return out;
}

std::vector<Rational> uniform_grid(std::size_t intervals) {
  if (intervals == 0) throw InvalidInput("grid needs at least one interval");
  std::vector<Rational> g;
  g.reserve(intervals + 1);
  for (std::size_t k = 0; k <= intervals; ++k) g.emplace_back(Rational(static_cast<long>(k), static_cast<long>(intervals)));
  for (auto& r : g) r.canonicalize();
  return g;
}

std::vector<Rational> default_probe_grid() {
  auto g = uniform_grid(256);
  for (long k = 1; k <= 40; ++k) g.emplace_back(1, k + 1);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

std::string to_string(Convergence c) {
  switch (c) {
    case Convergence::uniform: return "uniform";
    case Convergence::pointwise_only: return "pointwise_only";
    case Convergence::undetermined: return "undetermined";
  }
  return "undetermined";
}

ConvergenceReport classify_convergence(const System& s, const ConvergenceOptions& opt) {
  if (!s.limit()) throw InvalidInput("convergence classification needs a limit map");
  if (opt.n_from == 0 || opt.n_to < opt.n_from) throw InvalidInput("bad tail range");
  if (opt.tol <= 0) throw InvalidInput("tolerance must be positive");
  const PLMap& f = *s.limit();

  ConvergenceReport rep{Convergence::undetermined, {}, 0};
  bool all_below = true, all_gap = true;
  for (std::size_t n = opt.n_from; n <= opt.n_to; ++n) {
    Rational d = sup_dist(s.member(n), f);
    all_below = all_below && d < opt.tol;
    all_gap = all_gap && d >= 2 * opt.tol;
    rep.sup_dist.push_back(std::move(d));
  }
  for (const auto& x : opt.probes) {
    Rational fx = f(x);
    for (std::size_t n = opt.n_from; n <= opt.n_to; ++n) {
      if (abs(Rational(s.apply(n, x) - fx)) < opt.tol) {
        ++rep.probes_below_tol;
        break;
      }
    }
  }
  if (all_below)
    rep.verdict = Convergence::uniform;
  else if (all_gap && rep.probes_below_tol == opt.probes.size())
    rep.verdict = Convergence::pointwise_only;
  return rep;
}

double equicontinuity_modulus(const System& s, double eps, std::size_t n_from, std::size_t n_to) {
  if (!(eps > 0)) throw InvalidInput("eps must be positive");
  if (n_from == 0 || n_to < n_from) throw InvalidInput("bad index range");
  Rational slope = 0;
  for (std::size_t n = n_from; n <= n_to; ++n) slope = std::max(slope, s.rule().max_slope(n));
  // slope * eps * 2^-k <= eps  <=>  slope <= 2^k
  Rational bound = 1;
  for (int k = 0; k <= 60; ++k) {
    if (slope <= bound) return std::ldexp(eps, -k);
    bound *= 2;
  }
  return 0.0;
}

std::string to_string(Metric m) { return m == Metric::sup ? "sup" : "int"; }

Metric metric_from_string(const std::string& s) {
  if (s == "sup") return Metric::sup;
  if (s == "int" || s == "integral") return Metric::integral;
  throw InvalidInput("metric must be sup or int, got " + s);
}

Rational map_distance(const PLMap& a, const PLMap& b, Metric m) {
  return m == Metric::sup ? sup_dist(a, b) : int_dist(a, b);
}

RhoF rho_F_dist(const System& a, const System& b, Metric metric, std::size_t horizon) {
  if (horizon == 0) throw InvalidInput("horizon must be positive");
  RhoF out{0, std::nullopt, false, 0};
  for (std::size_t n = 1; n <= horizon; ++n) {
    Rational d = map_distance(a.member(n), b.member(n), metric);
    if (d > out.value || n == 1) {
      out.value = d;
      out.argmax = n;
    }
  }
  auto ca = a.rule().constant_from();
  auto cb = b.rule().constant_from();
  if (ca && cb && *ca <= horizon && *cb <= horizon) {
    out.exact = true;
    out.upper = out.value;
    return out;
  }
  auto ta = a.tail_bound(horizon + 1);
  auto tb = b.tail_bound(horizon + 1);
  if (ta && tb && a.limit() && b.limit()) {
    Rational tail = *ta + sup_dist(*a.limit(), *b.limit()) + *tb;
    out.upper = std::max(out.value, tail);
    out.exact = tail <= out.value;
  }
  return out;
}

}  // namespace nads
