#include "nads/constructions.hpp"

#include <algorithm>
#include <bit>

namespace nads {

namespace {

Integer pow3(std::size_t e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), 3, e);
  return r;
}

std::size_t to_size(const Integer& z) { return static_cast<std::size_t>(z.get_ui()); }

// Integral over an interval of length len of |d| with d linear from d0 to d1.
Rational trapezoid_abs(const Rational& len, const Rational& d0, const Rational& d1) {
  if (sgn(d0) * sgn(d1) >= 0) return len * abs(Rational(d0 + d1)) / 2;
  return len * (d0 * d0 + d1 * d1) / (2 * (abs(d0) + abs(d1)));
}

// Power sums over k in [s, e).
Integer sum_k(const Integer& s, const Integer& e) { return (e * (e - 1) - s * (s - 1)) / 2; }
Integer sum_k2(const Integer& s, const Integer& e) {
  auto F = [](const Integer& n) -> Integer { return (n - 1) * n * (2 * n - 1) / 6; };
  return F(e) - F(s);
}

// sum over k in [k0, k1) of trapezoid_abs(len, A0 + B k, A1 + B k).
Rational sum_linear_family(const Rational& len, const Rational& A0, const Rational& A1, const Rational& B,
                           const Integer& k0, const Integer& k1) {
  if (k1 <= k0) return 0;
  std::vector<Integer> cuts{k0, k1};
  if (B != 0) {
    for (const Rational* A : {&A0, &A1}) {
      Integer c = floor(Rational(-*A / B)) + 1;
      if (c > k0 && c < k1) cuts.push_back(c);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  Rational total = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Integer& s = cuts[i];
    const Integer& e = cuts[i + 1];
    if (e - s <= 3) {
      for (Integer k = s; k < e; ++k) total += trapezoid_abs(len, A0 + B * k, A1 + B * k);
      continue;
    }
    Integer rep = s;
    for (const Integer& c : {Integer(s), Integer(e - 1), Integer((s + e - 1) / 2)}) {
      if (A0 + B * c != 0 && A1 + B * c != 0) {
        rep = c;
        break;
      }
    }
    Rational d0 = A0 + B * rep, d1 = A1 + B * rep;
    Integer n0 = e - s, n1 = sum_k(s, e);
    if (sgn(d0) * sgn(d1) >= 0) {
      int sigma = sgn(Rational(d0 + d1));
      total += sigma * len / 2 * ((A0 + A1) * n0 + 2 * B * n1);
    } else {
      Integer n2 = sum_k2(s, e);
      total += len / (2 * abs(Rational(A1 - A0))) * ((A0 * A0 + A1 * A1) * n0 + 2 * B * (A0 + A1) * n1 + 2 * B * B * n2);
    }
  }
  return total;
}

std::vector<Breakpoint> join(std::vector<Breakpoint> a, const std::vector<Breakpoint>& b) {
  if (a.empty()) return b;
  for (std::size_t i = (b.front().x == a.back().x ? 1 : 0); i < b.size(); ++i) a.push_back(b[i]);
  return canonicalize(std::move(a));
}

constexpr std::size_t kDirectTeeth = 2000;

}  // namespace

// ---------------------------------------------------------------- figure1

Rational figure1_window_lo(std::size_t n) { return Rational(1, static_cast<unsigned long>(n + 2)); }
Rational figure1_window_hi(std::size_t n) { return Rational(1, static_cast<unsigned long>(n + 1)); }

std::size_t figure1_window_index(const Rational& x) {
  if (x <= 0 || x > Rational(1, 2)) return 0;
  return to_size(floor(Rational(1 / x))) - 1;
}

Figure1Rule::Figure1Rule(Figure1Params p) : p_(std::move(p)) {
  if (p_.height <= Rational(1, 2) || p_.height > 1) throw InvalidInput("figure1 height must lie in (1/2, 1]");
}

Rational Figure1Rule::apply(std::size_t n, const Rational& x) const {
  if (n == 0) throw InvalidInput("system members are indexed from 1");
  if (x < 0 || x > 1) throw InvalidInput("evaluation point outside [0,1]");
  Rational L = figure1_window_lo(n), R = figure1_window_hi(n);
  if (x <= L || x >= R) return x;
  Integer m = pow3(n - 1);
  Rational t = (x - L) * m / (R - L);
  Integer k = floor(t);
  Rational u = t - k;
  const Rational& h = p_.height;
  if (u <= Rational(1, 2)) return L + (h - L) * 2 * u;
  const Rational& end = (k == m - 1) ? R : L;
  return h + (end - h) * (2 * u - 1);
}

std::vector<Breakpoint> Figure1Rule::restrict(std::size_t n, const Rational& lo, const Rational& hi) const {
  if (!(lo < hi)) throw InvalidInput("empty restriction range");
  Rational L = figure1_window_lo(n), R = figure1_window_hi(n);
  std::vector<Breakpoint> pts;
  pts.push_back({lo, apply(n, lo)});
  if (L > lo && L < hi) pts.push_back({L, L});
  if (hi > L && lo < R) {
    Integer m = pow3(n - 1);
    Rational w = (R - L) / m;
    Rational a = std::max(lo, L), b = std::min(hi, R);
    Integer k_lo = std::min(floor(Rational((a - L) / w)), Integer(m - 1));
    Integer k_hi = std::min(floor(Rational((b - L) / w)), Integer(m - 1));
    Integer count = k_hi - k_lo + 1;
    std::size_t budget = breakpoint_budget();
    if (count > Integer(static_cast<unsigned long>(budget / 2))) {
      throw BudgetExceeded(budget + 1, budget, n);
    }
    for (Integer k = k_lo; k <= k_hi; ++k) {
      Rational ak = L + k * w;
      Rational peak = ak + w / 2;
      if (peak > lo && peak < hi) pts.push_back({peak, p_.height});
      Rational valley = ak + w;
      if (valley > lo && valley < hi) pts.push_back({valley, k == m - 1 ? R : L});
    }
  }
  pts.push_back({hi, apply(n, hi)});
  return canonicalize(std::move(pts));
}

Rational Figure1Rule::max_slope(std::size_t n) const {
  Rational L = figure1_window_lo(n), R = figure1_window_hi(n);
  Rational s = 2 * (p_.height - L) * pow3(n - 1) / (R - L);
  return std::max(s, Rational(1));
}

Rational Figure1Rule::abs_integral_against(std::size_t n, std::span<const Breakpoint> g) const {
  const Rational& lo = g.front().x;
  const Rational& hi = g.back().x;
  Rational L = figure1_window_lo(n), R = figure1_window_hi(n);
  Integer m = pow3(n - 1);
  auto direct = [&](const Rational& u, const Rational& v) -> Rational {
    if (!(u < v)) return 0;
    return abs_integral(restrict(n, u, v), slice(g, u, v));
  };
  if (m <= kDirectTeeth || hi <= L || lo >= R) return direct(lo, hi);

  Rational total = direct(lo, std::min(hi, L)) + direct(std::max(lo, R), hi);
  Rational a = std::max(lo, L), b = std::min(hi, R);
  if (!(a < b)) return total;

  Rational w = (R - L) / m;
  const Rational& h = p_.height;
  // g's breakpoints split [a, b] into pieces where g is linear.
  std::vector<Rational> xs{a};
  for (const auto& p : g)
    if (p.x > a && p.x < b) xs.push_back(p.x);
  xs.push_back(b);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const Rational& u = xs[i];
    const Rational& v = xs[i + 1];
    Integer k_start = ceil(Rational((u - L) / w));
    Integer k_end = std::min(floor(Rational((v - L) / w)), Integer(m - 1));
    if (k_end <= k_start) {
      total += direct(u, v);
      continue;
    }
    Rational a_start = L + k_start * w, a_end = L + k_end * w;
    total += direct(u, a_start) + direct(a_end, v);

    Rational gu = eval_piece(g, u), gv = eval_piece(g, v);
    Rational alpha = (gv - gu) / (v - u);
    Rational beta = gu - alpha * u;
    Rational B = -alpha * w;
    Rational A0 = L - alpha * L - beta;                 // floor minus g at a_k
    Rational A1 = h - alpha * (L + w / 2) - beta;       // peak minus g at a_k + w/2
    Rational A2 = A0 - alpha * w;                       // floor minus g at a_{k+1}
    Rational half = w / 2;
    total += sum_linear_family(half, A0, A1, B, k_start, k_end);
    total += sum_linear_family(half, A1, A2, B, k_start, k_end);
  }
  return total;
}

PLMap Figure1Rule::build(std::size_t n) const { return PLMap(restrict(n, 0, 1)); }

nlohmann::json Figure1Rule::to_json() const { return {{"kind", "figure1"}, {"height", to_string(p_.height)}}; }

PLMap figure1_map(std::size_t n, const Figure1Params& p) {
  if (n == 0) throw InvalidInput("system members are indexed from 1");
  return Figure1Rule(p).member(n);
}

System figure1_system(const Figure1Params& p) { return System(std::make_shared<Figure1Rule>(p)); }

// ---------------------------------------------------------------- shrink

ShrinkRule::ShrinkRule(System base, std::size_t N) : base_(std::move(base)), N_(N) {
  if (!base_.limit()) throw InvalidInput("shrink_toward_limit needs a system with a limit map");
  if (N_ == 0) throw InvalidInput("shrink index N must be at least 1");
  limit_ = *base_.limit();
}

PLMap ShrinkRule::build(std::size_t n) const {
  PLMap fn = base_.rule().member(n);
  if (n <= N_) return fn;
  return affine_combine(fn, limit_, 1 - pow2_neg(n));
}

Rational ShrinkRule::apply(std::size_t n, const Rational& x) const {
  if (n <= N_) return base_.apply(n, x);
  Rational fx = limit_(x);
  return fx + pow2_neg(n) * (base_.apply(n, x) - fx);
}

std::vector<Breakpoint> ShrinkRule::restrict(std::size_t n, const Rational& lo, const Rational& hi) const {
  auto mine = base_.rule().restrict(n, lo, hi);
  if (n <= N_) return mine;
  return combine_pieces(mine, slice(limit_, lo, hi), 1 - pow2_neg(n));
}

std::optional<Rational> ShrinkRule::declared_rate(std::size_t n) const {
  if (n > N_) return pow2_neg(n);
  return Rational(1);
}

nlohmann::json ShrinkRule::to_json() const {
  return {{"kind", "shrink"}, {"N", N_}, {"base", nads::to_json(base_)}};
}

System shrink_toward_limit(const System& s, std::size_t N) {
  auto rule = std::make_shared<ShrinkRule>(s, N);
  return System(rule, rule->natural_limit(), s.surjectivity());
}

// ---------------------------------------------------------------- dc1 window

WindowSpliceRule::WindowSpliceRule(System base, Rational eps) : base_(std::move(base)), eps_(std::move(eps)) {
  if (eps_ <= 0 || eps_ >= Rational(1, 4)) throw InvalidInput("window eps must lie in (0, 1/4)");
  if (base_.limit()) {
    const PLMap& f = *base_.limit();
    Rational two = 2 * eps_;
    std::vector<Breakpoint> pts{{0, 0}, {eps_ / 2, eps_}};
    auto br = bridge(f(two));
    pts.insert(pts.end(), br.begin(), br.end());
    limit_ = PLMap(join(std::move(pts), slice(f, two, 1)));
  }
}

std::vector<Breakpoint> WindowSpliceRule::bridge(const Rational& end_value) const {
  return {{eps_, 0}, {eps_ + eps_ / 3, 1}, {eps_ + 2 * eps_ / 3, 0}, {2 * eps_, end_value}};
}

std::vector<Breakpoint> WindowSpliceRule::window_piece(std::size_t n) const {
  std::vector<Breakpoint> pts{{0, 0}, {eps_ / 2, eps_}};
  auto br = bridge(base_.apply(n, 2 * eps_));
  pts.insert(pts.end(), br.begin(), br.end());
  return canonicalize(std::move(pts));
}

Rational WindowSpliceRule::modification_int_dist(std::size_t n) const {
  return base_.rule().abs_integral_against(n, window_piece(n));
}

Rational WindowSpliceRule::apply(std::size_t n, const Rational& x) const {
  if (n == 0) throw InvalidInput("system members are indexed from 1");
  if (x <= eps_) {
    if (x < 0) throw InvalidInput("evaluation point outside [0,1]");
    return 2 * x <= eps_ ? Rational(2 * x) : Rational(2 * eps_ - 2 * x);
  }
  if (x <= 2 * eps_) return eval_piece(bridge(base_.apply(n, 2 * eps_)), x);
  return base_.apply(n, x);
}

std::vector<Breakpoint> WindowSpliceRule::restrict(std::size_t n, const Rational& lo, const Rational& hi) const {
  if (!(lo < hi)) throw InvalidInput("empty restriction range");
  Rational two = 2 * eps_;
  std::vector<Breakpoint> out;
  if (lo < two) out = slice(window_piece(n), lo, std::min(hi, two));
  if (hi > two) out = join(std::move(out), base_.rule().restrict(n, std::max(lo, two), hi));
  return canonicalize(std::move(out));
}

Rational WindowSpliceRule::abs_integral_against(std::size_t n, std::span<const Breakpoint> g) const {
  const Rational& lo = g.front().x;
  const Rational& hi = g.back().x;
  Rational two = 2 * eps_;
  Rational total = 0;
  if (lo < two) {
    Rational top = std::min(hi, two);
    total += abs_integral(slice(window_piece(n), lo, top), slice(g, lo, top));
  }
  if (hi > two) {
    auto rest = slice(g, std::max(lo, two), hi);
    total += base_.rule().abs_integral_against(n, rest);
  }
  return total;
}

std::optional<Rational> WindowSpliceRule::declared_rate(std::size_t n) const { return base_.rule().declared_rate(n); }

PLMap WindowSpliceRule::build(std::size_t n) const { return PLMap(restrict(n, 0, 1)); }

nlohmann::json WindowSpliceRule::to_json() const {
  return {{"kind", "dc1_window"}, {"eps", to_string(eps_)}, {"base", nads::to_json(base_)}};
}

System dc1_window_splice(const System& s, const Rational& eps) {
  auto rule = std::make_shared<WindowSpliceRule>(s, eps);
  return System(rule, rule->natural_limit(), s.surjectivity());
}

Rational transport_into_window(const Rational& x, const Rational& eps) {
  if (x < 0 || x > 1) throw InvalidInput("point outside [0,1]");
  return eps * x;
}

// ---------------------------------------------------------------- tail splice

TailSpliceRule::TailSpliceRule(System base, PLMap tail, std::size_t N0)
    : base_(std::move(base)), tail_(std::move(tail)), N0_(N0) {
  if (N0_ == 0) throw InvalidInput("splice index N0 must be at least 1");
}

PLMap TailSpliceRule::build(std::size_t n) const { return n < N0_ ? base_.rule().member(n) : tail_; }

Rational TailSpliceRule::apply(std::size_t n, const Rational& x) const {
  if (n == 0) throw InvalidInput("system members are indexed from 1");
  return n < N0_ ? base_.apply(n, x) : tail_(x);
}

std::vector<Breakpoint> TailSpliceRule::restrict(std::size_t n, const Rational& lo, const Rational& hi) const {
  return n < N0_ ? base_.rule().restrict(n, lo, hi) : slice(tail_, lo, hi);
}

Rational TailSpliceRule::max_slope(std::size_t n) const {
  return n < N0_ ? base_.rule().max_slope(n) : max_abs_slope(tail_);
}

Rational TailSpliceRule::abs_integral_against(std::size_t n, std::span<const Breakpoint> g) const {
  if (n < N0_) return base_.rule().abs_integral_against(n, g);
  return abs_integral(slice(tail_, g.front().x, g.back().x), g);
}

nlohmann::json TailSpliceRule::to_json() const {
  return {{"kind", "tail_splice"}, {"N0", N0_}, {"tail", nads::to_json(tail_)}, {"base", nads::to_json(base_)}};
}

System splice_tail(const System& s, const PLMap& h, std::size_t N0) {
  return System(std::make_shared<TailSpliceRule>(s, h, N0), h, s.surjectivity());
}

SpliceChoice choose_splice_index(const System& s, const Rational& eps, Metric metric, std::size_t scan_max) {
  if (!s.limit()) throw InvalidInput("choose_splice_index needs a system with a limit map");
  if (eps <= 0) throw InvalidInput("eps must be positive");
  if (scan_max == 0) throw InvalidInput("scan range must be nonempty");
  const PLMap& f = *s.limit();

  // First index whose certified tail bound is already below eps.
  std::size_t certified = 0;
  SpliceChoice out;
  for (std::size_t n = 1; n <= scan_max; ++n) {
    auto tb = s.tail_bound(n);
    if (tb && *tb < eps) {
      certified = n;
      out.tail_bound = *tb;
      break;
    }
  }
  std::size_t last = certified ? certified - 1 : scan_max;
  for (std::size_t n = 1; n <= last; ++n) out.distances.push_back(map_distance(s.member(n), f, metric));

  std::size_t N0 = certified ? certified : 0;
  for (std::size_t n = last; n >= 1; --n) {
    if (!(out.distances[n - 1] < eps)) break;
    N0 = n;
  }
  if (N0 == 0) throw InvalidInput("no splice index certified within the scan range");
  out.N0 = N0;
  return out;
}

// ---------------------------------------------------------------- flat tent

PLMap flat_tent_map(const Rational& u) {
  if (u < 0 || u > 1) throw InvalidInput("cut level must lie in [0,1]");
  if (u == 0) return PLMap({{0, 0}, {1, 0}});
  if (u == 1) return PLMap::tent();
  return PLMap({{0, 0}, {u / 2, u}, {1 - u / 2, u}, {1, 0}});
}

FlatTentRule::FlatTentRule(std::vector<Rational> schedule) : schedule_(std::move(schedule)) {
  if (schedule_.empty()) throw InvalidInput("flat tent schedule must be nonempty");
  for (const auto& u : schedule_)
    if (u < 0 || u > 1) throw InvalidInput("cut level must lie in [0,1]");
}

const Rational& FlatTentRule::cut(std::size_t n) const {
  if (n == 0) throw InvalidInput("system members are indexed from 1");
  return schedule_[std::min(n, schedule_.size()) - 1];
}

Rational FlatTentRule::apply(std::size_t n, const Rational& x) const {
  if (x < 0 || x > 1) throw InvalidInput("evaluation point outside [0,1]");
  Rational t = x <= Rational(1, 2) ? Rational(2 * x) : Rational(2 - 2 * x);
  return std::min(t, cut(n));
}

PLMap FlatTentRule::build(std::size_t n) const { return flat_tent_map(cut(n)); }

nlohmann::json FlatTentRule::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& u : schedule_) arr.push_back(to_string(u));
  return {{"kind", "flat_tent"}, {"schedule", arr}};
}

System flat_tent_system(std::vector<Rational> schedule) {
  return System(std::make_shared<FlatTentRule>(std::move(schedule)), Surjectivity::warn);
}

// ---------------------------------------------------------------- tent itineraries

std::size_t ItinerarySchedule::total() const {
  std::size_t s = 0;
  for (auto b : blocks) s += b;
  return s;
}

bool ItinerarySchedule::dominant() const {
  std::size_t sum = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i] == 0) return false;
    if (i && (blocks[i] <= blocks[i - 1] || blocks[i] < 2 * sum)) return false;
    sum += blocks[i];
  }
  return true;
}

ItinerarySchedule ItinerarySchedule::dominance(std::size_t first, std::size_t ratio, std::size_t total) {
  if (first == 0 || ratio < 2 || total == 0) throw InvalidInput("dominance schedule needs first >= 1, ratio >= 2");
  ItinerarySchedule s;
  std::size_t sum = 0, next = first;
  while (sum < total) {
    std::size_t b = std::min(next, total - sum);
    if (!s.blocks.empty() && b < 2 * sum) {
      s.blocks.back() += b;
    } else {
      s.blocks.push_back(b);
    }
    sum += b;
    next = ratio * sum;
  }
  return s;
}

ItinerarySchedule ItinerarySchedule::for_horizon(std::size_t N) {
  std::size_t a = std::max<std::size_t>(1, N / 2000);
  std::size_t b = 39 * a;
  std::size_t c = std::max(N + 64 > a + b ? N + 64 - a - b : 0, 2 * (a + b));
  return ItinerarySchedule{{a, b, c}};
}

std::pair<std::vector<Symbol>, std::vector<Symbol>> schedule_itineraries(const ItinerarySchedule& s,
                                                                         std::size_t depth) {
  if (s.blocks.empty()) throw InvalidInput("empty itinerary schedule");
  if (depth < s.total()) throw InvalidInput("itinerary depth shorter than the schedule (infeasible refinement)");
  std::vector<Symbol> x, y;
  x.reserve(depth);
  y.reserve(depth);
  std::size_t block = 0, left = s.blocks[0];
  for (std::size_t j = 0; j < depth; ++j) {
    while (left == 0 && block + 1 < s.blocks.size()) left = s.blocks[++block];
    if (left) --left;
    if (block % 2 == 0) {
      Symbol a = (j % 2 == 0) ? Symbol::L : Symbol::R;
      x.push_back(a);
      y.push_back(a);
    } else {
      x.push_back(Symbol::L);
      y.push_back(Symbol::R);
    }
  }
  return {std::move(x), std::move(y)};
}

Rational tent_point_from_itinerary(std::span<const Symbol> itinerary) {
  const std::size_t d = itinerary.size();
  Integer j;
  mpz_realloc2(j.get_mpz_t(), d + 2);
  bool increasing = true;
  for (std::size_t k = 0; k < d; ++k) {
    bool right = itinerary[k] == Symbol::R;
    if (right != !increasing) mpz_setbit(j.get_mpz_t(), d - 1 - k);
    if (right) increasing = !increasing;
  }
  Rational x(Integer(2 * j + 1));
  mpq_div_2exp(x.get_mpq_t(), x.get_mpq_t(), d + 1);
  return x;
}

std::vector<Symbol> tent_itinerary(Rational x, std::size_t depth) {
  if (x < 0 || x > 1) throw InvalidInput("point outside [0,1]");
  std::vector<Symbol> out;
  out.reserve(depth);
  const Rational half(1, 2);
  for (std::size_t k = 0; k < depth; ++k) {
    if (x <= half) {
      out.push_back(Symbol::L);
      mpq_mul_2exp(x.get_mpq_t(), x.get_mpq_t(), 1);
    } else {
      out.push_back(Symbol::R);
      x = 2 - 2 * x;
    }
  }
  return out;
}

TentPair tent_pair_from_schedule(const ItinerarySchedule& s, std::size_t depth) {
  auto [ix, iy] = schedule_itineraries(s, depth);
  return {tent_point_from_itinerary(ix), tent_point_from_itinerary(iy), depth};
}

// ---------------------------------------------------------------- odometer

namespace {

std::uint64_t last_mask(std::size_t depth) {
  std::size_t r = depth % 64;
  return r == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << r) - 1;
}

}  // namespace

CantorPoint::CantorPoint(std::size_t depth) : words_((depth + 63) / 64, 0), depth_(depth) {
  if (depth == 0) throw InvalidInput("code depth must be at least 1");
}

CantorPoint::CantorPoint(const std::vector<int>& bits) : CantorPoint(bits.size()) {
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != 0 && bits[i] != 1) throw InvalidInput("code bits must be 0 or 1");
    if (bits[i]) words_[i / 64] |= std::uint64_t{1} << (i % 64);
  }
}

CantorPoint CantorPoint::from_integer(std::size_t depth, std::uint64_t value) {
  CantorPoint p(depth);
  p.words_[0] = value;
  p.words_.back() &= last_mask(depth);
  return p;
}

CantorPoint CantorPoint::random(std::size_t depth, std::mt19937_64& rng) {
  CantorPoint p(depth);
  for (auto& w : p.words_) w = rng();
  p.words_.back() &= last_mask(depth);
  return p;
}

std::vector<int> CantorPoint::bits() const {
  std::vector<int> out(depth_);
  for (std::size_t i = 0; i < depth_; ++i) out[i] = bit(i);
  return out;
}

std::string CantorPoint::to_string() const {
  std::string s(depth_, '0');
  for (std::size_t i = 0; i < depth_; ++i)
    if (bit(i)) s[i] = '1';
  return s;
}

void CantorPoint::increment() {
  const std::size_t last = words_.size() - 1;
  for (std::size_t i = 0; i <= last; ++i) {
    ++words_[i];
    if (i == last) words_[i] &= last_mask(depth_);
    if (words_[i] != 0) return;
  }
}

CantorPoint odometer_step(CantorPoint x) {
  x.increment();
  return x;
}

double cantor_distance(const CantorPoint& a, const CantorPoint& b) {
  if (a.depth() != b.depth()) throw InvalidInput("codes of different depth");
  const auto& wa = a.words();
  const auto& wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) {
    std::uint64_t d = wa[i] ^ wb[i];
    if (d) return std::ldexp(1.0, -static_cast<int>(64 * i + std::countr_zero(d)));
  }
  return 0.0;
}

OdometerSystem odometer_system(std::size_t depth) {
  if (depth == 0) throw InvalidInput("code depth must be at least 1");
  return OdometerSystem{depth};
}

nlohmann::json to_json(const OdometerSystem& s) {
  return {{"rule", {{"kind", "odometer"}, {"depth", s.depth}}},
          {"limit", nullptr},
          {"space", "cantor"},
          {"surjectivity", "require"}};
}

DistanceSeries distance_series(const OdometerSystem& s, const CantorPoint& x, const CantorPoint& y, std::size_t N) {
  if (x.depth() != s.depth || y.depth() != s.depth) throw InvalidInput("code depth does not match the system");
  DistanceSeries out{x.to_string(), y.to_string(), {}};
  out.values.reserve(N);
  CantorPoint a = x, b = y;
  for (std::size_t j = 0; j < N; ++j) {
    if (j) {
      a.increment();
      b.increment();
    }
    out.values.push_back(cantor_distance(a, b));
  }
  return out;
}

double rho_n(const OdometerSystem& s, const CantorPoint& x, const CantorPoint& y, std::size_t n) {
  if (n == 0) throw InvalidInput("rho_n needs n >= 1");
  auto series = distance_series(s, x, y, n);
  return *std::max_element(series.values.begin(), series.values.end());
}

}  // namespace nads
