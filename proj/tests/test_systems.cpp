#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "nads/constructions.hpp"
#include "nads/systems.hpp"
#include "oracles.hpp"

using namespace nads;

namespace {

Rational q(long a, long b) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}

}  // namespace

TEST_CASE("members") {
  auto tent = constant_system(PLMap::tent());
  CHECK(tent.member(7) == PLMap::tent());
  CHECK_THROWS_AS(tent.member(0), InvalidInput);

  auto f1 = figure1_system().member(1);
  CHECK(f1 == PLMap({{0, 0}, {q(1, 3), q(1, 3)}, {q(5, 12), 1}, {q(1, 2), q(1, 2)}, {1, 1}}));

  auto lc = list_then_constant_system({PLMap::tent(), PLMap::reflection()}, PLMap::identity());
  CHECK(lc.member(2) == PLMap::reflection());
  CHECK(lc.member(3) == PLMap::identity());
  CHECK(lc.rule().constant_from() == 3u);

  auto spliced = splice_tail(tent, PLMap::identity(), 5);
  CHECK(spliced.member(4) == PLMap::tent());
  CHECK(spliced.member(5) == PLMap::identity());
  for (std::size_t n = 5; n < 40; ++n) CHECK(spliced.member(n) == PLMap::identity());
}

TEST_CASE("surjectivity policy") {
  CHECK_THROWS_AS(constant_system(flat_tent_map(q(4, 5))).member(1), InvalidInput);
  std::vector<std::string> seen;
  set_warning_handler([&](const std::string& m) { seen.push_back(m); });
  auto s = constant_system(flat_tent_map(q(4, 5)), Surjectivity::warn);
  CHECK(s.member(3) == flat_tent_map(q(4, 5)));
  CHECK(seen.size() == 1);
  set_warning_handler(nullptr);
}

TEST_CASE("prefix compositions") {
  CHECK(prefix_composition(constant_system(PLMap::identity()), 100) == PLMap::identity());
  auto F = figure1_system();
  CHECK(peak_count(prefix_composition(F, 2)) == 4);
  CHECK(peak_count(prefix_composition(F, 4)) == 40);
  auto all = prefix_compositions(F, 4);
  REQUIRE(all.size() == 5);
  CHECK(all[0] == PLMap::identity());
  CHECK(all[3] == prefix_composition(F, 3));

  set_breakpoint_budget(50);
  try {
    prefix_composition(F, 6);
    FAIL("expected budget exhaustion");
  } catch (const BudgetExceeded& e) {
    CHECK(e.index() >= 1);
  }
  set_breakpoint_budget(kDefaultBreakpointBudget);
}

TEST_CASE("point iteration agrees with prefix composition") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<long> pick(0, 10007);
  auto F = figure1_system();
  auto T = constant_system(PLMap::tent());
  std::vector<System> systems{F, T, flat_tent_system({q(1, 1), q(9, 10), q(4, 5)})};
  for (const auto& s : systems) {
    auto prefixes = prefix_compositions(s, 6);
    for (int i = 0; i < 60; ++i) {
      Rational x = q(pick(rng), 10007);
      auto orb = orbit(s, x, 7);
      for (std::size_t n = 0; n <= 6; ++n) {
        CHECK(iterate_point(s, x, n) == prefixes[n](x));
        CHECK(orb[n] == prefixes[n](x));
      }
    }
  }
}

TEST_CASE("orbits") {
  auto F = figure1_system();
  for (std::size_t n : {1u, 5u, 50u, 500u}) CHECK(iterate_point(F, q(3, 4), n) == q(3, 4));
  // points of (1/3, 1/2) are fixed after the first step
  for (long k = 1; k < 20; ++k) {
    Rational x = q(1, 3) + q(k, 20) * q(1, 6);
    auto orb = orbit(F, x, 30);
    for (std::size_t j = 2; j < orb.size(); ++j) CHECK(orb[j] == orb[1]);
  }
  auto T = constant_system(PLMap::tent());
  auto orb = orbit(T, q(1, 3), 4);
  CHECK(orb == std::vector<Rational>{q(1, 3), q(2, 3), q(2, 3), q(2, 3)});
}

TEST_CASE("window points are fixed from their window index on") {
  auto F = figure1_system();
  for (std::size_t n = 1; n <= 10; ++n) {
    Rational lo = figure1_window_lo(n), hi = figure1_window_hi(n);
    for (long k = 1; k <= 20; ++k) {
      Rational x = lo + (hi - lo) * q(k, 20);
      CHECK(figure1_window_index(x) == n);
      auto orb = orbit(F, x, n + 8);
      for (std::size_t j = n; j < orb.size(); ++j) CHECK(orb[j] == orb[n]);
    }
  }
}

TEST_CASE("rho_n") {
  auto F = figure1_system();
  Rational x = q(2, 5), y = q(9, 20);
  CHECK(rho_n(F, x, y, 1) == q(1, 20));
  Rational fx = oracle::interp(F.member(1).breakpoints(), x), fy = oracle::interp(F.member(1).breakpoints(), y);
  CHECK(rho_n(F, x, y, 2) == std::max(abs(Rational(fx - fy)), q(1, 20)));
  CHECK(std::abs(to_double(fx) - oracle::figure1(1, 0.4)) < 1e-12);
  CHECK(std::abs(to_double(fy) - oracle::figure1(1, 0.45)) < 1e-12);

  auto T = constant_system(PLMap::tent());
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<long> pick(0, 997);
  for (int i = 0; i < 20; ++i) {
    Rational a = q(pick(rng), 997), b = q(pick(rng), 997);
    Rational prev = 0;
    for (std::size_t n = 1; n <= 12; ++n) {
      Rational r = rho_n(T, a, b, n);
      CHECK(r >= prev);
      CHECK(r == rho_n(T, b, a, n));
      prev = r;
    }
    CHECK(rho_n(T, a, a, 12) == 0);
  }
}

TEST_CASE("distance series") {
  auto F = figure1_system();
  auto same = distance_series(F, q(1, 7), q(1, 7), 50);
  CHECK(same.horizon() == 50);
  for (double d : same.values) CHECK(d == 0.0);

  auto ds = distance_series(F, q(1, 5) + q(1, 1000), q(1, 9) + q(1, 1000), 60);
  for (std::size_t j = 9; j < 60; ++j) CHECK(ds.values[j] == ds.values[9]);
  for (double d : ds.values) {
    CHECK(d >= 0.0);
    CHECK(d <= 1.0);
  }
}

TEST_CASE("convergence classification") {
  CHECK(classify_convergence(constant_system(PLMap::tent())).verdict == Convergence::uniform);
  auto rep = classify_convergence(figure1_system());
  CHECK(rep.verdict == Convergence::pointwise_only);
  REQUIRE(rep.sup_dist.size() == 6);
  for (std::size_t i = 0; i < rep.sup_dist.size(); ++i) {
    std::size_t n = 5 + i;
    CHECK(rep.sup_dist[i] >= 1 - figure1_window_hi(n));
  }
  CHECK(classify_convergence(shrink_toward_limit(figure1_system(), 3)).verdict == Convergence::uniform);

  auto no_limit = System(std::make_shared<ConstantRule>(PLMap::tent()), std::nullopt, Surjectivity::require);
  CHECK_THROWS_AS(classify_convergence(no_limit), InvalidInput);
}

TEST_CASE("equicontinuity modulus") {
  CHECK(equicontinuity_modulus(constant_system(PLMap::identity()), 0.1, 1, 5) == doctest::Approx(0.1));
  CHECK(equicontinuity_modulus(constant_system(PLMap::tent()), 0.1, 1, 5) == doctest::Approx(0.05));
  auto F = figure1_system();
  double prev = 1.0;
  for (std::size_t n_to : {2u, 4u, 8u, 16u, 32u}) {
    double d = equicontinuity_modulus(F, 0.1, 1, n_to);
    CHECK(d < prev);
    prev = d;
  }
  // independent: the steepest tooth of f_n has slope 2(1 - L) 3^(n-1) / (R - L)
  for (std::size_t n = 1; n <= 8; ++n) CHECK(F.rule().max_slope(n) == max_abs_slope(F.member(n)));
}

TEST_CASE("rho_F") {
  auto T = constant_system(PLMap::tent());
  auto r = rho_F_dist(T, T, Metric::sup, 5);
  CHECK(r.value == 0);
  CHECK(r.exact);

  auto F = figure1_system();
  auto spliced = splice_tail(F, PLMap::identity(), 4);
  auto rf = rho_F_dist(F, spliced, Metric::sup, 8);
  Rational expect = 0;
  for (std::size_t n = 4; n <= 8; ++n) expect = std::max(expect, sup_dist(F.member(n), PLMap::identity()));
  CHECK(rf.value == expect);
  CHECK_FALSE(rf.exact);  // figure1 has no certified tail

  auto S = shrink_toward_limit(F, 3);
  auto rs = rho_F_dist(S, splice_tail(S, PLMap::identity(), 6), Metric::sup, 10);
  REQUIRE(rs.upper);
  CHECK(*rs.upper < Rational(1, 10));
  auto ri = rho_F_dist(S, F, Metric::integral, 6);
  CHECK(ri.value > 0);
  CHECK(ri.value <= rho_F_dist(S, F, Metric::sup, 6).value);
}

TEST_CASE("tail bounds") {
  auto S = shrink_toward_limit(figure1_system(), 3);
  for (std::size_t n = 4; n <= 9; ++n) {
    auto b = S.tail_bound(n);
    REQUIRE(b);
    CHECK(*b == pow2_neg(n));
    CHECK(sup_dist(S.member(n), PLMap::identity()) <= *b);
  }
  auto L = list_then_constant_system({PLMap::tent()}, PLMap::identity());
  CHECK(*L.tail_bound(1) == 1);
  CHECK(*L.tail_bound(2) == 0);
  CHECK_FALSE(figure1_system().tail_bound(3));
}

TEST_CASE("probe grid") {
  auto g = default_probe_grid();
  CHECK(std::is_sorted(g.begin(), g.end()));
  CHECK(std::find(g.begin(), g.end(), q(1, 41)) != g.end());
  CHECK(g.front() == 0);
  CHECK(g.back() == 1);
  // 257 lattice points; 1/2 .. 1/32 are already among them
  CHECK(g.size() == 257 + 40 - 5);
}
