#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "nads/constructions.hpp"
#include "nads/plmap.hpp"
#include "oracles.hpp"

using namespace nads;

namespace {

Rational q(long a, long b) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}

}  // namespace

TEST_CASE("rational parsing") {
  CHECK(parse_rational("1/3") == q(1, 3));
  CHECK(parse_rational("-2/4") == q(-1, 2));
  CHECK(parse_rational("0.25") == q(1, 4));
  CHECK(parse_rational("010") == 10);
  CHECK(parse_rational("010/012") == q(5, 6));
  CHECK(parse_rational("1e-3") == q(1, 1000));
  CHECK(parse_rational("2.5E1") == 25);
  CHECK(parse_rational(" 7 ") == 7);
  CHECK_THROWS_AS(parse_rational("1/0"), InvalidInput);
  CHECK_THROWS_AS(parse_rational("abc"), InvalidInput);
  CHECK_THROWS_AS(parse_rational(""), InvalidInput);
  CHECK(to_double(q(1, 20)) == 0.05);
  CHECK(to_double(q(1, 10)) == 0.1);
  CHECK(pow2_neg(3) == q(1, 8));
}

TEST_CASE("construction validates and canonicalises") {
  CHECK_THROWS_AS(PLMap({{0, 0}}), InvalidInput);
  CHECK_THROWS_AS(PLMap({{0, 0}, {q(1, 2), 2}, {1, 0}}), InvalidInput);
  CHECK_THROWS_AS(PLMap({{0, 0}, {q(1, 2), 1}, {q(1, 2), 0}, {1, 1}}), InvalidInput);
  CHECK_THROWS_AS(PLMap({{q(1, 10), 0}, {1, 1}}), InvalidInput);

  PLMap m({{0, 0}, {q(1, 4), q(1, 4)}, {q(1, 2), q(1, 2)}, {1, 1}});
  CHECK(m.size() == 2);
  CHECK(m == PLMap::identity());

  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    auto r = oracle::random_plmap(rng, 6);
    auto once = canonicalize(r.breakpoints());
    CHECK(canonicalize(once) == once);
  }
}

TEST_CASE("evaluation") {
  PLMap t = PLMap::tent();
  CHECK(t(q(1, 3)) == q(2, 3));
  CHECK(t(q(2, 3)) == q(2, 3));
  CHECK(t(q(1, 2)) == 1);
  CHECK(t(0) == 0);
  CHECK_THROWS_AS(t(q(3, 2)), InvalidInput);
  CHECK(PLMap::reflection()(q(1, 5)) == q(4, 5));
}

TEST_CASE("composition agrees with pointwise evaluation") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<long> pick(0, 1'000'003);
  for (int trial = 0; trial < 5; ++trial) {
    PLMap f = oracle::random_plmap(rng, 5);
    PLMap g = oracle::random_plmap(rng, 7);
    PLMap gf = compose(g, f);
    for (int i = 0; i < 200; ++i) {
      Rational x = q(pick(rng), 1'000'003);
      CHECK(gf(x) == g(f(x)));
    }
  }
  PLMap t2 = compose(PLMap::tent(), PLMap::tent());
  CHECK(t2.size() == 5);
  CHECK(peak_count(t2) == 2);
}

TEST_CASE("lap count bound under composition") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    PLMap f = oracle::random_plmap(rng, 4);
    PLMap g = oracle::random_plmap(rng, 4);
    CHECK(lap_count(compose(g, f)) <= lap_count(g) * lap_count(f));
  }
  // every lap of the tent is onto [0,1]
  PLMap t = PLMap::tent();
  PLMap f = PLMap({{0, 0}, {q(1, 3), 1}, {q(2, 3), 0}, {1, 1}});
  CHECK(lap_count(compose(f, t)) == lap_count(f) * lap_count(t));
  CHECK(lap_count(compose(t, f)) == lap_count(t) * lap_count(f));
}

TEST_CASE("budget") {
  PLMap t = PLMap::tent();
  PLMap f = t;
  for (int i = 0; i < 5; ++i) f = compose(t, f);
  CHECK_THROWS_AS(compose(t, f, 10), BudgetExceeded);
  try {
    compose(t, f, 10);
  } catch (const BudgetExceeded& e) {
    CHECK(e.budget() == 10);
    CHECK(e.requested() > 10);
  }
}

TEST_CASE("affine combination scales the sup distance") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    PLMap a = oracle::random_plmap(rng, 5);
    PLMap b = oracle::random_plmap(rng, 3);
    Rational w = q(std::uniform_int_distribution<long>(0, 16)(rng), 16);
    PLMap c = affine_combine(a, b, w);
    CHECK(sup_dist(c, b) == (1 - w) * sup_dist(a, b));
  }
  CHECK_THROWS_AS(affine_combine(PLMap::tent(), PLMap::identity(), 2), InvalidInput);
}

TEST_CASE("distances") {
  PLMap id = PLMap::identity(), t = PLMap::tent();
  // |tent - id| = x on [0,1/2], 2-3x on [1/2,2/3], 3x-2 on [2/3,1]
  CHECK(int_dist(t, id) == q(1, 8) + q(1, 24) + q(1, 6));
  CHECK(sup_dist(t, id) == 1);
  CHECK(sup_dist(PLMap::reflection(), id) == 1);
  CHECK(int_dist(PLMap::reflection(), id) == q(1, 2));

  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    PLMap a = oracle::random_plmap(rng, 4);
    PLMap b = oracle::random_plmap(rng, 5);
    Rational I = int_dist(a, b), S = sup_dist(a, b);
    CHECK(I <= S);
    CHECK(I == int_dist(b, a));
    if (i < 10) {
      double num = oracle::integral_abs_diff([&](double x) { return to_double(a(rational_from_double(x))); },
                                             [&](double x) { return to_double(b(rational_from_double(x))); }, 0, 1,
                                             20000);
      CHECK(std::abs(num - to_double(I)) < 1e-4);
    }
  }
}

TEST_CASE("pieces") {
  PLMap t = PLMap::tent();
  auto s = slice(t, q(1, 4), q(3, 4));
  REQUIRE(s.size() == 3);
  CHECK(s.front().x == q(1, 4));
  CHECK(s.front().y == q(1, 2));
  CHECK(s[1].x == q(1, 2));
  CHECK(eval_piece(s, q(5, 8)) == q(3, 4));
  std::vector<Breakpoint> flat{{q(1, 4), q(1, 2)}, {q(3, 4), q(1, 2)}};
  CHECK(abs_integral(s, flat) == q(1, 8));
  CHECK(sup_abs_diff(s, flat) == q(1, 2));
  auto c = combine_pieces(s, flat, q(1, 2));
  CHECK(eval_piece(c, q(1, 2)) == q(3, 4));
}

TEST_CASE("surjectivity") {
  CHECK(is_surjective(PLMap::tent()));
  CHECK_FALSE(is_surjective(flat_tent_map(q(4, 5))));
  CHECK(is_surjective(figure1_map(5)));
  CHECK(is_surjective(PLMap::reflection()));
}

TEST_CASE("laps, peaks and turning points") {
  PLMap t = PLMap::tent();
  CHECK(lap_count(t) == 2);
  CHECK(peak_count(t) == 1);
  CHECK(turning_point_count(t) == 1);
  PLMap f = flat_tent_map(q(4, 5));
  CHECK(peak_count(f) == 0);  // a plateau is not a strict maximum
  CHECK(lap_count(f) == 2);
  CHECK(peak_count(PLMap::identity()) == 0);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    PLMap r = oracle::random_plmap(rng, 8, 31);
    std::vector<Rational> ys;
    for (const auto& b : r.breakpoints()) ys.push_back(b.y);
    CHECK(peak_count(r) == oracle::sampled_peaks(ys));
  }
}

TEST_CASE("slopes and extremes") {
  CHECK(max_abs_slope(PLMap::tent()) == 2);
  CHECK(min_value(flat_tent_map(q(4, 5))) == 0);
  CHECK(max_value(flat_tent_map(q(4, 5))) == q(4, 5));
}

TEST_CASE("json round trip") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 10; ++i) {
    PLMap r = oracle::random_plmap(rng, 5);
    CHECK(plmap_from_json(to_json(r)) == r);
  }
  CHECK(plmap_from_json(nlohmann::json("tent")) == PLMap::tent());
  auto j = nlohmann::json::parse(R"([[0, 0], ["1/2", 1], [1, "0"]])");
  CHECK(plmap_from_json(j) == PLMap::tent());
  auto d = nlohmann::json::parse(R"([[0, 0], [0.5, 1], [1, 0]])");
  CHECK(plmap_from_json(d) == PLMap::tent());
  CHECK_THROWS_AS(plmap_from_json(nlohmann::json::parse(R"([[0, 0], [1, 2]])")), InvalidInput);
  CHECK_THROWS_AS(plmap_from_json(nlohmann::json("square")), InvalidInput);
}
