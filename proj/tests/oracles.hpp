#pragma once

// Independent reference implementations used to check the library. Nothing here
// calls into nads beyond the Rational alias and PLMap accessors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "nads/plmap.hpp"

namespace oracle {

using nads::Rational;

// Linear interpolation over raw (x, y) pairs, exact.
inline Rational interp(const std::vector<nads::Breakpoint>& pts, const Rational& x) {
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (x >= pts[i].x && x <= pts[i + 1].x) {
      Rational t = (x - pts[i].x) / (pts[i + 1].x - pts[i].x);
      return pts[i].y + t * (pts[i + 1].y - pts[i].y);
    }
  }
  return pts.back().y;
}

// Sawtooth family straight from its geometric description, in doubles.
inline double figure1(std::size_t n, double x, double h = 1.0) {
  double L = 1.0 / double(n + 2), R = 1.0 / double(n + 1);
  if (x <= L || x >= R) return x;
  double m = std::pow(3.0, double(n - 1));
  double w = (R - L) / m;
  double k = std::floor((x - L) / w);
  if (k > m - 1) k = m - 1;
  double left = L + k * w;
  double mid = left + w / 2;
  if (x <= mid) return L + (h - L) * (x - left) / (w / 2);
  double end = (k == m - 1) ? R : L;
  return h + (end - h) * (x - mid) / (w / 2);
}

// Strict interior local maxima of a function sampled at sorted abscissae, counting a
// plateau once when both neighbours are lower.
inline std::size_t sampled_peaks(const std::vector<Rational>& ys) {
  std::size_t peaks = 0;
  std::size_t i = 1;
  while (i + 1 < ys.size()) {
    if (ys[i] > ys[i - 1]) {
      std::size_t j = i;
      while (j + 1 < ys.size() && ys[j + 1] == ys[i]) ++j;
      if (j + 1 < ys.size() && ys[j + 1] < ys[i]) ++peaks;
      i = j + 1;
    } else {
      ++i;
    }
  }
  return peaks;
}

// Numerical integral of |f - g| by the midpoint rule on `cells` cells.
inline double integral_abs_diff(const std::function<double(double)>& f, const std::function<double(double)>& g,
                                double lo, double hi, std::size_t cells) {
  double h = (hi - lo) / double(cells), s = 0;
  for (std::size_t i = 0; i < cells; ++i) {
    double x = lo + (double(i) + 0.5) * h;
    s += std::abs(f(x) - g(x));
  }
  return s * h;
}

// Exact tent map step.
inline Rational tent(const Rational& x) { return x <= Rational(1, 2) ? Rational(2 * x) : Rational(2 - 2 * x); }

// 2-adic valuation of (a - b) mod 2^D, D for equal words.
inline std::size_t valuation_mod(std::uint64_t a, std::uint64_t b, std::size_t D) {
  std::uint64_t mask = D >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << D) - 1);
  std::uint64_t d = (a - b) & mask;
  if (d == 0) return D;
  std::size_t v = 0;
  while (!(d & 1)) {
    d >>= 1;
    ++v;
  }
  return v;
}

// Maximum subset of points in which every pair is "separated", by exhaustive
// branch and bound. Only for small inputs.
inline std::size_t max_separated_subset(std::size_t count, const std::function<bool(std::size_t, std::size_t)>& sep) {
  std::vector<std::vector<char>> ok(count, std::vector<char>(count, 0));
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = i + 1; j < count; ++j) ok[i][j] = ok[j][i] = sep(i, j);
  std::size_t best = 0;
  std::vector<std::size_t> chosen;
  std::function<void(std::size_t, std::vector<std::size_t>)> go = [&](std::size_t size,
                                                                       std::vector<std::size_t> cand) {
    if (cand.empty()) {
      best = std::max(best, size);
      return;
    }
    if (size + cand.size() <= best) return;
    while (!cand.empty()) {
      if (size + cand.size() <= best) return;
      std::size_t v = cand.back();
      cand.pop_back();
      std::vector<std::size_t> next;
      for (std::size_t u : cand)
        if (ok[v][u]) next.push_back(u);
      go(size + 1, next);
    }
  };
  std::vector<std::size_t> all(count);
  for (std::size_t i = 0; i < count; ++i) all[i] = i;
  go(0, all);
  return best;
}

// A random continuous PL self-map with k interior breakpoints on a 1/den lattice.
inline nads::PLMap random_plmap(std::mt19937_64& rng, std::size_t k, long den = 97) {
  std::uniform_int_distribution<long> pick(1, den - 1), val(0, den);
  std::vector<long> xs;
  while (xs.size() < k) {
    long x = pick(rng);
    if (std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
  }
  std::sort(xs.begin(), xs.end());
  std::vector<nads::Breakpoint> pts{{0, Rational(val(rng), den)}};
  for (long x : xs) pts.push_back({Rational(x, den), Rational(val(rng), den)});
  pts.push_back({1, Rational(val(rng), den)});
  for (auto& p : pts) {
    p.x.canonicalize();
    p.y.canonicalize();
  }
  return nads::PLMap(pts);
}

}  // namespace oracle
