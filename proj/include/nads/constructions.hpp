#pragma once

// Concrete systems: the sawtooth family, shrink and splice transforms, flat-topped
// tents, tent itinerary pairs and the binary odometer on code space.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nads/plmap.hpp"
#include "nads/rational.hpp"
#include "nads/systems.hpp"

namespace nads {

// ---------------------------------------------------------------- figure1

struct Figure1Params {
  Rational height{1};  // tooth height, in (1/2, 1]
};

// Window W_n = [1/(n+2), 1/(n+1)].
Rational figure1_window_lo(std::size_t n);
Rational figure1_window_hi(std::size_t n);
// Index n with x in (1/(n+2), 1/(n+1)], 0 for x outside (0, 1/2].
std::size_t figure1_window_index(const Rational& x);

// f_n is the identity outside W_n; on W_n it is a sawtooth of 3^(n-1) equal teeth,
// each rising from the window floor to the tooth height and back, the last one
// descending to the right endpoint instead. Nothing is materialised by apply,
// restrict, max_slope or abs_integral_against, so large n stays cheap.
class Figure1Rule final : public Rule {
 public:
  explicit Figure1Rule(Figure1Params p = {});
  std::string kind() const override { return "figure1"; }
  const Figure1Params& params() const { return p_; }

  Rational apply(std::size_t n, const Rational& x) const override;
  std::vector<Breakpoint> restrict(std::size_t n, const Rational& lo, const Rational& hi) const override;
  Rational max_slope(std::size_t n) const override;
  Rational abs_integral_against(std::size_t n, std::span<const Breakpoint> g) const override;
  std::optional<PLMap> natural_limit() const override { return PLMap::identity(); }
  nlohmann::json to_json() const override;

 protected:
  PLMap build(std::size_t n) const override;

 private:
  Figure1Params p_;
};

PLMap figure1_map(std::size_t n, const Figure1Params& p = {});
System figure1_system(const Figure1Params& p = {});

// ---------------------------------------------------------------- shrink

// g_n = f_n for n <= N, (1-w) f_n + w f with w = 1 - 2^-n beyond.
class ShrinkRule final : public Rule {
 public:
  ShrinkRule(System base, std::size_t N);
  std::string kind() const override { return "shrink"; }
  std::size_t N() const { return N_; }
  const System& base() const { return base_; }

  Rational apply(std::size_t n, const Rational& x) const override;
  std::vector<Breakpoint> restrict(std::size_t n, const Rational& lo, const Rational& hi) const override;
  std::optional<Rational> declared_rate(std::size_t n) const override;
  std::optional<PLMap> natural_limit() const override { return limit_; }
  nlohmann::json to_json() const override;

 protected:
  PLMap build(std::size_t n) const override;

 private:
  System base_;
  std::size_t N_;
  PLMap limit_;
};

System shrink_toward_limit(const System& s, std::size_t N);

// ---------------------------------------------------------------- dc1 window

// On [0, eps] every member is the tent rescaled onto [0, eps]; on [eps, 2 eps] a
// bridge 0 -> 1 -> 0 -> f_n(2 eps); the base member f_n on [2 eps, 1].
class WindowSpliceRule final : public Rule {
 public:
  WindowSpliceRule(System base, Rational eps);
  std::string kind() const override { return "dc1_window"; }
  const Rational& eps() const { return eps_; }
  const System& base() const { return base_; }

  // The modified part of g_n on [0, 2 eps].
  std::vector<Breakpoint> window_piece(std::size_t n) const;
  // Exact integral of |g_n - f_n| (they agree outside [0, 2 eps]).
  Rational modification_int_dist(std::size_t n) const;

  Rational apply(std::size_t n, const Rational& x) const override;
  std::vector<Breakpoint> restrict(std::size_t n, const Rational& lo, const Rational& hi) const override;
  Rational abs_integral_against(std::size_t n, std::span<const Breakpoint> g) const override;
  std::optional<Rational> declared_rate(std::size_t n) const override;
  std::optional<PLMap> natural_limit() const override { return limit_; }
  nlohmann::json to_json() const override;

 protected:
  PLMap build(std::size_t n) const override;

 private:
  std::vector<Breakpoint> bridge(const Rational& end_value) const;

  System base_;
  Rational eps_;
  std::optional<PLMap> limit_;
};

System dc1_window_splice(const System& s, const Rational& eps);
// eps * x: carries a point of [0,1] into the invariant window [0, eps].
Rational transport_into_window(const Rational& x, const Rational& eps);

// ---------------------------------------------------------------- tail splice

class TailSpliceRule final : public Rule {
 public:
  TailSpliceRule(System base, PLMap tail, std::size_t N0);
  std::string kind() const override { return "tail_splice"; }

  Rational apply(std::size_t n, const Rational& x) const override;
  std::vector<Breakpoint> restrict(std::size_t n, const Rational& lo, const Rational& hi) const override;
  Rational max_slope(std::size_t n) const override;
  Rational abs_integral_against(std::size_t n, std::span<const Breakpoint> g) const override;
  std::optional<std::size_t> constant_from() const override { return N0_; }
  std::optional<PLMap> natural_limit() const override { return tail_; }
  nlohmann::json to_json() const override;

 protected:
  PLMap build(std::size_t n) const override;

 private:
  System base_;
  PLMap tail_;
  std::size_t N0_;
};

System splice_tail(const System& s, const PLMap& h, std::size_t N0);

struct SpliceChoice {
  std::size_t N0 = 0;
  std::vector<Rational> distances;  // metric(f_n, limit) for n = 1..scan_max
  std::optional<Rational> tail_bound;  // certified bound beyond scan_max, if any
};

// Least N0 <= scan_max with metric(f_n, limit) < eps for every n in [N0, scan_max] and,
// when the system declares one, a tail bound below eps beyond scan_max.
SpliceChoice choose_splice_index(const System& s, const Rational& eps, Metric metric, std::size_t scan_max = 64);

// ---------------------------------------------------------------- flat tent

// min(tent(x), u).
PLMap flat_tent_map(const Rational& u);

class FlatTentRule final : public Rule {
 public:
  explicit FlatTentRule(std::vector<Rational> schedule);
  std::string kind() const override { return "flat_tent"; }
  Rational apply(std::size_t n, const Rational& x) const override;
  std::optional<std::size_t> constant_from() const override { return schedule_.size(); }
  std::optional<PLMap> natural_limit() const override { return flat_tent_map(schedule_.back()); }
  nlohmann::json to_json() const override;

 protected:
  PLMap build(std::size_t n) const override;

 private:
  const Rational& cut(std::size_t n) const;
  std::vector<Rational> schedule_;
};

// u_1, u_2, ..., u_k, then u_k forever. Runs under the warn policy.
System flat_tent_system(std::vector<Rational> schedule);

// ---------------------------------------------------------------- tent itineraries

enum class Symbol : std::uint8_t { L, R };

struct ItinerarySchedule {
  // Alternating agree / disagree blocks, starting with agree.
  std::vector<std::size_t> blocks;

  std::size_t total() const;
  // Strictly increasing and each block at least twice the sum of its predecessors.
  bool dominant() const;

  // first, first*ratio, ... until the sum reaches total; a short last block is merged.
  static ItinerarySchedule dominance(std::size_t first, std::size_t ratio, std::size_t total);
  // Three blocks sized for a DC1 witness at horizon N: agree max(1,N/2000),
  // disagree 39x that, agree to N + 64.
  static ItinerarySchedule for_horizon(std::size_t N);
};

std::pair<std::vector<Symbol>, std::vector<Symbol>> schedule_itineraries(const ItinerarySchedule& s,
                                                                         std::size_t depth);

// Midpoint of the depth-k tent cylinder with the given itinerary (L: x <= 1/2).
Rational tent_point_from_itinerary(std::span<const Symbol> itinerary);
// Tent itinerary of x for `depth` steps, computed by exact iteration.
std::vector<Symbol> tent_itinerary(Rational x, std::size_t depth);

struct TentPair {
  Rational x, y;
  std::size_t depth = 0;
};

TentPair tent_pair_from_schedule(const ItinerarySchedule& s, std::size_t depth);

// ---------------------------------------------------------------- odometer

class CantorPoint {
 public:
  explicit CantorPoint(std::size_t depth = 64);
  // bits[i] is coordinate i.
  explicit CantorPoint(const std::vector<int>& bits);
  static CantorPoint from_integer(std::size_t depth, std::uint64_t value);
  static CantorPoint random(std::size_t depth, std::mt19937_64& rng);

  std::size_t depth() const { return depth_; }
  int bit(std::size_t i) const { return static_cast<int>((words_[i / 64] >> (i % 64)) & 1u); }
  std::vector<int> bits() const;
  std::string to_string() const;

  // Add one with carry into higher coordinates; wraps at full depth.
  void increment();

  const std::vector<std::uint64_t>& words() const { return words_; }
  friend bool operator==(const CantorPoint&, const CantorPoint&) = default;

 private:
  std::vector<std::uint64_t> words_;
  std::size_t depth_;
};

CantorPoint odometer_step(CantorPoint x);
// 2^-k with k the first differing coordinate, 0 for equal codes.
double cantor_distance(const CantorPoint& a, const CantorPoint& b);

struct OdometerSystem {
  std::size_t depth = 64;
};

OdometerSystem odometer_system(std::size_t depth = 64);
nlohmann::json to_json(const OdometerSystem& s);

DistanceSeries distance_series(const OdometerSystem& s, const CantorPoint& x, const CantorPoint& y, std::size_t N);
double rho_n(const OdometerSystem& s, const CantorPoint& x, const CantorPoint& y, std::size_t n);

}  // namespace nads
