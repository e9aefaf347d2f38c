#pragma once

// Non-autonomous systems n -> f_n on [0,1], with optional limit map.

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "nads/plmap.hpp"
#include "nads/rational.hpp"

namespace nads {

enum class Surjectivity { require, warn };

std::string to_string(Surjectivity s);
Surjectivity surjectivity_from_string(const std::string& s);

// Warnings (non-surjective members under the warn policy) go through this sink;
// the default writes to stderr.
using WarningHandler = std::function<void(const std::string&)>;
void set_warning_handler(WarningHandler handler);
void emit_warning(const std::string& message);

// Generator of the members f_n, n >= 1. Implementations are immutable; member()
// memoises materialised maps behind a mutex so a rule can be shared across threads.
class Rule {
 public:
  virtual ~Rule() = default;
  Rule() = default;
  Rule(const Rule&) = delete;
  Rule& operator=(const Rule&) = delete;

  virtual std::string kind() const = 0;

  PLMap member(std::size_t n) const;

  // f_n(x) without materialising f_n where the rule allows it.
  virtual Rational apply(std::size_t n, const Rational& x) const;
  // Breakpoints of f_n on [lo, hi], endpoints included.
  virtual std::vector<Breakpoint> restrict(std::size_t n, const Rational& lo, const Rational& hi) const;
  virtual Rational max_slope(std::size_t n) const;
  // Exact integral of |f_n - g| over the x-range of the piece g.
  virtual Rational abs_integral_against(std::size_t n, std::span<const Breakpoint> g) const;

  // Index from which every member equals member(*constant_from()).
  virtual std::optional<std::size_t> constant_from() const { return std::nullopt; }
  // Upper bound on sup_dist(f_m, natural limit) valid for every m >= n.
  virtual std::optional<Rational> declared_rate(std::size_t) const { return std::nullopt; }
  virtual std::optional<PLMap> natural_limit() const { return std::nullopt; }

  virtual nlohmann::json to_json() const = 0;

 protected:
  virtual PLMap build(std::size_t n) const = 0;

 private:
  mutable std::mutex mu_;
  mutable std::map<std::size_t, PLMap> cache_;
};

using RulePtr = std::shared_ptr<const Rule>;

class ConstantRule final : public Rule {
 public:
  explicit ConstantRule(PLMap map) : map_(std::move(map)) {}
  std::string kind() const override { return "constant"; }
  Rational apply(std::size_t, const Rational& x) const override { return map_(x); }
  std::optional<std::size_t> constant_from() const override { return 1; }
  std::optional<PLMap> natural_limit() const override { return map_; }
  nlohmann::json to_json() const override;

 protected:
  PLMap build(std::size_t) const override { return map_; }

 private:
  PLMap map_;
};

class ListThenConstantRule final : public Rule {
 public:
  ListThenConstantRule(std::vector<PLMap> head, PLMap tail) : head_(std::move(head)), tail_(std::move(tail)) {}
  std::string kind() const override { return "list_then_constant"; }
  Rational apply(std::size_t n, const Rational& x) const override;
  std::optional<std::size_t> constant_from() const override { return head_.size() + 1; }
  std::optional<PLMap> natural_limit() const override { return tail_; }
  nlohmann::json to_json() const override;

 protected:
  PLMap build(std::size_t n) const override;

 private:
  std::vector<PLMap> head_;
  PLMap tail_;
};

class System {
 public:
  // Limit defaults to the rule's natural limit.
  explicit System(RulePtr rule, Surjectivity policy = Surjectivity::require);
  System(RulePtr rule, std::optional<PLMap> limit, Surjectivity policy);

  const Rule& rule() const { return *rule_; }
  const RulePtr& rule_ptr() const { return rule_; }
  const std::optional<PLMap>& limit() const { return limit_; }
  Surjectivity surjectivity() const { return policy_; }

  // f_n, checked against the surjectivity policy.
  PLMap member(std::size_t n) const;
  Rational apply(std::size_t n, const Rational& x) const;

  // Upper bound on sup_dist(f_m, limit) for all m >= n, when certifiable.
  std::optional<Rational> tail_bound(std::size_t n) const;

 private:
  RulePtr rule_;
  std::optional<PLMap> limit_;
  Surjectivity policy_;
};

System constant_system(PLMap map, Surjectivity policy = Surjectivity::require);
System list_then_constant_system(std::vector<PLMap> head, PLMap tail,
                                 Surjectivity policy = Surjectivity::require);

nlohmann::json to_json(const System& s);

// F_n = f_n o ... o f_1 (F_0 = identity).
PLMap prefix_composition(const System& s, std::size_t n);
// F_0 .. F_n.
std::vector<PLMap> prefix_compositions(const System& s, std::size_t n);

Rational iterate_point(const System& s, Rational x, std::size_t n);
// F_0(x) .. F_{N-1}(x).
std::vector<Rational> orbit(const System& s, const Rational& x, std::size_t N);

// max_{i<n} |F_i(x) - F_i(y)|.
Rational rho_n(const System& s, const Rational& x, const Rational& y, std::size_t n);

struct DistanceSeries {
  std::string x, y;            // the pair, as decimal text
  std::vector<double> values;  // d(F_j x, F_j y), j = 0..N-1
  std::size_t horizon() const { return values.size(); }
};

DistanceSeries distance_series(const System& s, const Rational& x, const Rational& y, std::size_t N);

// 257 equispaced rationals plus the window endpoints 1/(k+1), k <= 40.
std::vector<Rational> default_probe_grid();
std::vector<Rational> uniform_grid(std::size_t intervals);

enum class Convergence { uniform, pointwise_only, undetermined };
std::string to_string(Convergence c);

struct ConvergenceOptions {
  Rational tol{1, 20};
  std::size_t n_from = 5;
  std::size_t n_to = 10;
  std::vector<Rational> probes = default_probe_grid();
};

struct ConvergenceReport {
  Convergence verdict;
  std::vector<Rational> sup_dist;  // sup_dist(f_n, f) for n = n_from..n_to
  std::size_t probes_below_tol = 0;
};

// Finite-horizon verdict: uniform if sup_dist < tol on the whole tail; pointwise_only if
// every probe is within tol at some tail index while sup_dist >= 2*tol throughout.
ConvergenceReport classify_convergence(const System& s, const ConvergenceOptions& opt = {});

// Largest delta in the ladder eps*2^-k, k = 0..60, with max slope over f_n, n in [n_from, n_to],
// times delta <= eps; 0 if none.
double equicontinuity_modulus(const System& s, double eps, std::size_t n_from, std::size_t n_to);

enum class Metric { sup, integral };
std::string to_string(Metric m);
Metric metric_from_string(const std::string& s);
Rational map_distance(const PLMap& a, const PLMap& b, Metric m);

struct RhoF {
  Rational value;                     // sup over n <= horizon
  std::optional<Rational> upper;      // certified upper bound on the full sup, if available
  bool exact = false;                 // value is the full sup
  std::size_t argmax = 0;
};

RhoF rho_F_dist(const System& a, const System& b, Metric metric, std::size_t horizon);

}  // namespace nads
