#pragma once

// Exact continuous piecewise-linear self-maps of [0,1].

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nads/rational.hpp"

namespace nads {

struct Breakpoint {
  Rational x;
  Rational y;
  friend bool operator==(const Breakpoint& a, const Breakpoint& b) { return a.x == b.x && a.y == b.y; }
};

// Raised when an operation would produce more breakpoints than the configured cap.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(std::size_t requested, std::size_t budget, std::size_t index = 0);
  std::size_t requested() const noexcept { return requested_; }
  std::size_t budget() const noexcept { return budget_; }
  // Index of the system member / prefix reached when the cap was hit (0 if not applicable).
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t requested_;
  std::size_t budget_;
  std::size_t index_;
};

inline constexpr std::size_t kDefaultBreakpointBudget = 1'000'000;

// Process-wide breakpoint cap used as the default for composition and map generators.
std::size_t breakpoint_budget();
void set_breakpoint_budget(std::size_t cap);

class PLMap {
 public:
  // The identity map.
  PLMap();
  // Validates (x strictly increasing from 0 to 1, y in [0,1]) and canonicalises.
  explicit PLMap(std::vector<Breakpoint> points);

  static PLMap identity();
  static PLMap tent();
  static PLMap reflection();

  const std::vector<Breakpoint>& breakpoints() const noexcept { return pts_; }
  std::size_t size() const noexcept { return pts_.size(); }
  std::size_t segments() const noexcept { return pts_.size() - 1; }
  const Rational& slope(std::size_t segment) const { return slopes_[segment]; }

  // Index of the segment containing x (the left one at an interior breakpoint).
  std::size_t segment_of(const Rational& x) const;

  Rational operator()(const Rational& x) const;

  friend bool operator==(const PLMap& a, const PLMap& b) { return a.pts_ == b.pts_; }

 private:
  struct Trusted {};
  PLMap(std::vector<Breakpoint> canonical, Trusted);
  void build_slopes();

  std::vector<Breakpoint> pts_;
  std::vector<Rational> slopes_;

  friend PLMap compose(const PLMap&, const PLMap&, std::size_t);
  friend PLMap affine_combine(const PLMap&, const PLMap&, const Rational&);
};

// Drops the middle point of every collinear triple (exact slope comparison).
std::vector<Breakpoint> canonicalize(std::vector<Breakpoint> points);

inline Rational eval(const PLMap& m, const Rational& x) { return m(x); }

// outer o inner, exact. Throws BudgetExceeded past `budget` breakpoints.
PLMap compose(const PLMap& outer, const PLMap& inner, std::size_t budget = breakpoint_budget());

// (1-w)*a + w*b, w in [0,1].
PLMap affine_combine(const PLMap& a, const PLMap& b, const Rational& w);

// Maximal monotone piece. Flat segments join the lap they follow.
struct Lap {
  Rational x0, x1;
  Rational y_min, y_max;
  bool increasing;
  Rational diameter() const { return y_max - y_min; }
};

std::vector<Lap> laps(const PLMap& m);
std::size_t lap_count(const PLMap& m);
// Strict interior local maxima.
std::size_t peak_count(const PLMap& m);
// Strict interior local extrema (maxima and minima).
std::size_t turning_point_count(const PLMap& m);

Rational sup_dist(const PLMap& a, const PLMap& b);
Rational int_dist(const PLMap& a, const PLMap& b);

bool is_surjective(const PLMap& m);
Rational max_abs_slope(const PLMap& m);
Rational min_value(const PLMap& m);
Rational max_value(const PLMap& m);

// --- pieces: PL functions on a sub-interval [lo, hi], given by breakpoints ---

Rational eval_piece(std::span<const Breakpoint> piece, const Rational& x);
// Breakpoints of m restricted to [lo, hi] with both endpoints included.
std::vector<Breakpoint> slice(const PLMap& m, const Rational& lo, const Rational& hi);
std::vector<Breakpoint> slice(std::span<const Breakpoint> piece, const Rational& lo, const Rational& hi);
// Exact integral of |a-b| over the common x-range of two pieces.
Rational abs_integral(std::span<const Breakpoint> a, std::span<const Breakpoint> b);
// Exact max of |a-b| over the common x-range.
Rational sup_abs_diff(std::span<const Breakpoint> a, std::span<const Breakpoint> b);
// (1-w)*a + w*b over the common x-range, canonical.
std::vector<Breakpoint> combine_pieces(std::span<const Breakpoint> a, std::span<const Breakpoint> b,
                                       const Rational& w);

// JSON: array of [x, y]; coordinates are "p/q" strings or decimals. Also accepts
// the names "identity", "tent" and "reflection".
nlohmann::json to_json(const PLMap& m);
PLMap plmap_from_json(const nlohmann::json& j);
// Parses a JSON number or string into an exact rational (numbers via their decimal text).
Rational rational_from_json(const nlohmann::json& j);

}  // namespace nads
