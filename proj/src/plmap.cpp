#include "nads/plmap.hpp"

#include <algorithm>
#include <atomic>

namespace nads {

namespace {

std::atomic<std::size_t> g_budget{kDefaultBreakpointBudget};

bool collinear(const Breakpoint& a, const Breakpoint& b, const Breakpoint& c) {
  return (b.y - a.y) * (c.x - b.x) == (c.y - b.y) * (b.x - a.x);
}

int sign(const Rational& r) { return sgn(r); }

// Merged, deduplicated x-grid of two pieces over their common range.
std::vector<Rational> merged_grid(std::span<const Breakpoint> a, std::span<const Breakpoint> b) {
  std::vector<Rational> xs;
  xs.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    const Rational* next;
    if (j == b.size() || (i < a.size() && a[i].x <= b[j].x)) {
      next = &a[i].x;
      if (j < b.size() && b[j].x == a[i].x) ++j;
      ++i;
    } else {
      next = &b[j].x;
      ++j;
    }
    if (xs.empty() || xs.back() != *next) xs.push_back(*next);
  }
  return xs;
}

// Values of a piece at sorted grid points inside its range (linear walk).
std::vector<Rational> sample_sorted(std::span<const Breakpoint> p, std::span<const Rational> xs) {
  std::vector<Rational> out;
  out.reserve(xs.size());
  std::size_t seg = 0;
  for (const auto& x : xs) {
    while (seg + 2 < p.size() && p[seg + 1].x < x) ++seg;
    const auto& a = p[seg];
    const auto& b = p[seg + 1];
    if (x == a.x) {
      out.push_back(a.y);
    } else if (x == b.x) {
      out.push_back(b.y);
    } else {
      out.push_back(a.y + (x - a.x) * (b.y - a.y) / (b.x - a.x));
    }
  }
  return out;
}

// Exact integral over [x0,x1] of |d| where d is linear from d0 to d1.
Rational abs_linear_integral(const Rational& len, const Rational& d0, const Rational& d1) {
  if (sign(d0) * sign(d1) >= 0) return len * abs(Rational(d0 + d1)) / 2;
  return len * (d0 * d0 + d1 * d1) / (2 * (abs(d0) + abs(d1)));
}

void check_piece(std::span<const Breakpoint> p) {
  if (p.size() < 2) throw InvalidInput("piece needs at least two breakpoints");
}

}  // namespace

BudgetExceeded::BudgetExceeded(std::size_t requested, std::size_t budget, std::size_t index)
    : std::runtime_error("breakpoint budget exceeded: " + std::to_string(requested) + " > " +
                         std::to_string(budget) + (index ? " at index " + std::to_string(index) : std::string())),
      requested_(requested),
      budget_(budget),
      index_(index) {}

std::size_t breakpoint_budget() { return g_budget.load(std::memory_order_relaxed); }
void set_breakpoint_budget(std::size_t cap) {
  if (cap < 2) throw InvalidInput("breakpoint budget must be at least 2");
  g_budget.store(cap, std::memory_order_relaxed);
}

std::vector<Breakpoint> canonicalize(std::vector<Breakpoint> points) {
  std::vector<Breakpoint> out;
  out.reserve(points.size());
  for (auto& p : points) {
    while (out.size() >= 2 && collinear(out[out.size() - 2], out.back(), p)) out.pop_back();
    out.push_back(std::move(p));
  }
  return out;
}

PLMap::PLMap() : PLMap({{0, 0}, {1, 1}}, Trusted{}) {}

PLMap::PLMap(std::vector<Breakpoint> points) {
  if (points.size() < 2) throw InvalidInput("PLMap needs at least two breakpoints");
  if (points.front().x != 0 || points.back().x != 1) throw InvalidInput("PLMap domain must be [0,1]");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].y < 0 || points[i].y > 1) throw InvalidInput("PLMap value outside [0,1]");
    if (i && !(points[i - 1].x < points[i].x)) throw InvalidInput("PLMap x-coordinates must be strictly increasing");
  }
  pts_ = canonicalize(std::move(points));
  build_slopes();
}

PLMap::PLMap(std::vector<Breakpoint> canonical, Trusted) : pts_(std::move(canonical)) { build_slopes(); }

void PLMap::build_slopes() {
  slopes_.clear();
  slopes_.reserve(pts_.size() - 1);
  for (std::size_t i = 0; i + 1 < pts_.size(); ++i)
    slopes_.push_back((pts_[i + 1].y - pts_[i].y) / (pts_[i + 1].x - pts_[i].x));
}

PLMap PLMap::identity() { return PLMap(); }
PLMap PLMap::tent() { return PLMap({{0, 0}, {Rational(1, 2), 1}, {1, 0}}, Trusted{}); }
PLMap PLMap::reflection() { return PLMap({{0, 1}, {1, 0}}, Trusted{}); }

std::size_t PLMap::segment_of(const Rational& x) const {
  auto it = std::lower_bound(pts_.begin() + 1, pts_.end() - 1, x,
                             [](const Breakpoint& b, const Rational& v) { return b.x < v; });
  return static_cast<std::size_t>(it - pts_.begin()) - 1;
}

Rational PLMap::operator()(const Rational& x) const {
  if (x < 0 || x > 1) throw InvalidInput("evaluation point outside [0,1]: " + to_string(x));
  std::size_t s = segment_of(x);
  const auto& a = pts_[s];
  if (x == a.x) return a.y;
  if (x == pts_[s + 1].x) return pts_[s + 1].y;
  return a.y + slopes_[s] * (x - a.x);
}

PLMap compose(const PLMap& outer, const PLMap& inner, std::size_t budget) {
  const auto& ob = outer.breakpoints();
  const auto& ib = inner.breakpoints();
  auto by_x = [](const Breakpoint& b, const Rational& v) { return b.x < v; };

  std::vector<Breakpoint> out;
  out.reserve(ib.size());
  auto push = [&](Rational x, Rational y) {
    if (out.size() >= budget) throw BudgetExceeded(out.size() + 1, budget);
    out.push_back({std::move(x), std::move(y)});
  };

  push(ib.front().x, outer(ib.front().y));
  for (std::size_t s = 0; s + 1 < ib.size(); ++s) {
    const auto& p = ib[s];
    const auto& q = ib[s + 1];
    if (p.y != q.y) {
      const Rational& slope = inner.slope(s);
      const Rational& lo = p.y < q.y ? p.y : q.y;
      const Rational& hi = p.y < q.y ? q.y : p.y;
      // outer breakpoints strictly inside (lo, hi)
      auto first = std::upper_bound(ob.begin(), ob.end(), lo,
                                    [](const Rational& v, const Breakpoint& b) { return v < b.x; });
      auto last = std::lower_bound(ob.begin(), ob.end(), hi, by_x);
      if (p.y < q.y) {
        for (auto it = first; it != last; ++it) push(p.x + (it->x - p.y) / slope, it->y);
      } else {
        for (auto it = last; it != first;) {
          --it;
          push(p.x + (it->x - p.y) / slope, it->y);
        }
      }
    }
    push(q.x, outer(q.y));
  }
  return PLMap(canonicalize(std::move(out)), PLMap::Trusted{});
}

std::vector<Breakpoint> combine_pieces(std::span<const Breakpoint> a, std::span<const Breakpoint> b,
                                       const Rational& w) {
  check_piece(a);
  check_piece(b);
  if (a.front().x != b.front().x || a.back().x != b.back().x) throw InvalidInput("pieces over different ranges");
  if (w < 0 || w > 1) throw InvalidInput("combination weight outside [0,1]: " + to_string(w));
  auto xs = merged_grid(a, b);
  auto ya = sample_sorted(a, xs);
  auto yb = sample_sorted(b, xs);
  Rational keep = 1 - w;
  std::vector<Breakpoint> pts;
  pts.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) pts.push_back({xs[i], keep * ya[i] + w * yb[i]});
  return canonicalize(std::move(pts));
}

PLMap affine_combine(const PLMap& a, const PLMap& b, const Rational& w) {
  return PLMap(combine_pieces(a.breakpoints(), b.breakpoints(), w), PLMap::Trusted{});
}

std::vector<Lap> laps(const PLMap& m) {
  const auto& p = m.breakpoints();
  std::vector<Lap> out;
  int dir = 0;
  Lap cur{p[0].x, p[0].x, p[0].y, p[0].y, true};
  for (std::size_t s = 0; s + 1 < p.size(); ++s) {
    int d = sign(Rational(p[s + 1].y - p[s].y));
    if (d != 0 && dir != 0 && d != dir) {
      cur.increasing = dir > 0;
      out.push_back(cur);
      cur = Lap{p[s].x, p[s].x, p[s].y, p[s].y, true};
      dir = 0;
    }
    if (d != 0) dir = d;
    cur.x1 = p[s + 1].x;
    if (p[s + 1].y < cur.y_min) cur.y_min = p[s + 1].y;
    if (p[s + 1].y > cur.y_max) cur.y_max = p[s + 1].y;
  }
  cur.increasing = dir >= 0;
  out.push_back(cur);
  return out;
}

std::size_t lap_count(const PLMap& m) { return laps(m).size(); }

std::size_t peak_count(const PLMap& m) {
  const auto& p = m.breakpoints();
  std::size_t n = 0;
  for (std::size_t i = 1; i + 1 < p.size(); ++i)
    if (p[i - 1].y < p[i].y && p[i + 1].y < p[i].y) ++n;
  return n;
}

std::size_t turning_point_count(const PLMap& m) {
  const auto& p = m.breakpoints();
  std::size_t n = 0;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    bool max = p[i - 1].y < p[i].y && p[i + 1].y < p[i].y;
    bool min = p[i - 1].y > p[i].y && p[i + 1].y > p[i].y;
    if (max || min) ++n;
  }
  return n;
}

Rational sup_dist(const PLMap& a, const PLMap& b) { return sup_abs_diff(a.breakpoints(), b.breakpoints()); }
Rational int_dist(const PLMap& a, const PLMap& b) { return abs_integral(a.breakpoints(), b.breakpoints()); }

Rational min_value(const PLMap& m) {
  return std::min_element(m.breakpoints().begin(), m.breakpoints().end(),
                          [](const Breakpoint& a, const Breakpoint& b) { return a.y < b.y; })
      ->y;
}

Rational max_value(const PLMap& m) {
  return std::max_element(m.breakpoints().begin(), m.breakpoints().end(),
                          [](const Breakpoint& a, const Breakpoint& b) { return a.y < b.y; })
      ->y;
}

bool is_surjective(const PLMap& m) { return min_value(m) == 0 && max_value(m) == 1; }

Rational max_abs_slope(const PLMap& m) {
  Rational best = 0;
  for (std::size_t s = 0; s < m.segments(); ++s) {
    Rational a = abs(m.slope(s));
    if (a > best) best = a;
  }
  return best;
}

Rational eval_piece(std::span<const Breakpoint> piece, const Rational& x) {
  check_piece(piece);
  if (x < piece.front().x || x > piece.back().x) throw InvalidInput("point outside piece range");
  auto it = std::lower_bound(piece.begin() + 1, piece.end() - 1, x,
                             [](const Breakpoint& b, const Rational& v) { return b.x < v; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  if (x == b.x) return b.y;
  if (x == a.x) return a.y;
  return a.y + (x - a.x) * (b.y - a.y) / (b.x - a.x);
}

std::vector<Breakpoint> slice(std::span<const Breakpoint> piece, const Rational& lo, const Rational& hi) {
  check_piece(piece);
  if (!(lo < hi) || lo < piece.front().x || hi > piece.back().x) throw InvalidInput("bad slice range");
  std::vector<Breakpoint> out;
  out.push_back({lo, eval_piece(piece, lo)});
  for (const auto& b : piece)
    if (lo < b.x && b.x < hi) out.push_back(b);
  out.push_back({hi, eval_piece(piece, hi)});
  return out;
}

std::vector<Breakpoint> slice(const PLMap& m, const Rational& lo, const Rational& hi) {
  return slice(std::span<const Breakpoint>(m.breakpoints()), lo, hi);
}

Rational abs_integral(std::span<const Breakpoint> a, std::span<const Breakpoint> b) {
  check_piece(a);
  check_piece(b);
  if (a.front().x != b.front().x || a.back().x != b.back().x) throw InvalidInput("pieces over different ranges");
  auto xs = merged_grid(a, b);
  auto ya = sample_sorted(a, xs);
  auto yb = sample_sorted(b, xs);
  Rational total = 0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    total += abs_linear_integral(xs[i + 1] - xs[i], ya[i] - yb[i], ya[i + 1] - yb[i + 1]);
  return total;
}

Rational sup_abs_diff(std::span<const Breakpoint> a, std::span<const Breakpoint> b) {
  check_piece(a);
  check_piece(b);
  if (a.front().x != b.front().x || a.back().x != b.back().x) throw InvalidInput("pieces over different ranges");
  auto xs = merged_grid(a, b);
  auto ya = sample_sorted(a, xs);
  auto yb = sample_sorted(b, xs);
  Rational best = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    Rational d = abs(Rational(ya[i] - yb[i]));
    if (d > best) best = d;
  }
  return best;
}

Rational rational_from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number()) return parse_rational(j.dump());
  throw InvalidInput("expected a number or rational string, got " + j.dump());
}

nlohmann::json to_json(const PLMap& m) {
  auto arr = nlohmann::json::array();
  for (const auto& b : m.breakpoints()) arr.push_back({to_string(b.x), to_string(b.y)});
  return arr;
}

PLMap plmap_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    auto name = j.get<std::string>();
    if (name == "identity") return PLMap::identity();
    if (name == "tent") return PLMap::tent();
    if (name == "reflection") return PLMap::reflection();
    throw InvalidInput("unknown map name: " + name);
  }
  if (!j.is_array()) throw InvalidInput("PLMap must be an array of [x, y] pairs");
  std::vector<Breakpoint> pts;
  pts.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) throw InvalidInput("PLMap breakpoint must be [x, y]");
    pts.push_back({rational_from_json(e[0]), rational_from_json(e[1])});
  }
  return PLMap(std::move(pts));
}

}  // namespace nads
