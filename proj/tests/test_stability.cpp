#include <doctest.h>

#include "bmlab/mechanisms.hpp"
#include "bmlab/randmarket.hpp"
#include "bmlab/stability.hpp"
#include "oracles.hpp"

using namespace bmlab;

TEST_CASE("blocking pair in the truthful Boston outcome of M3") {
  const Market m = fixtures::m3();
  const Matching x = matching_1based({2, 3, 1});
  const auto bp = blocking_pairs(m, x);
  REQUIRE(bp.size() == 1);
  CHECK(bp[0] == BlockingPair{1, 1});  // (i2, s2)
  CHECK_FALSE(is_stable(m, x));
  CHECK(is_stable(m, matching_1based({1, 2, 3})));
}

TEST_CASE("stable sets of the fixtures") {
  const StableSet m3 = enumerate_stable(fixtures::m3());
  REQUIRE(m3.size() == 1);
  CHECK(m3[0].assignment == matching_1based({1, 2, 3}).assignment);

  const StableSet m2a = enumerate_stable(fixtures::m2a());
  REQUIRE(m2a.size() == 1);
  CHECK(m2a[0].assignment == matching_1based({1, 2}).assignment);
}

TEST_CASE("a market with opposed sides has both diagonal matchings stable") {
  // Students like their own index best, schools like the other student best.
  const Market m = make_market_1based({{1, 2}, {2, 1}}, {{2, 1}, {1, 2}});
  const StableSet set = enumerate_stable(m);
  REQUIRE(set.size() == 2);
  CHECK(set[0].assignment == matching_1based({1, 2}).assignment);
  CHECK(set[1].assignment == matching_1based({2, 1}).assignment);
}

TEST_CASE("enumerate_stable refuses large markets") {
  CHECK_THROWS_AS(enumerate_stable(sample_market(9, SeedSpec{1, 1})), UnsupportedSize);
  CHECK_THROWS_AS(enumerate_stable(fixtures::m3(), 2), UnsupportedSize);
}

TEST_CASE("enumerate_stable agrees with the definition") {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const std::size_t n = 1 + seed % 7;
    const Market m = sample_market(n, SeedSpec{seed, 9});
    const StableSet set = enumerate_stable(m);
    CHECK(set == oracle::stable_set(m));
    REQUIRE_FALSE(set.empty());
    CHECK(std::is_sorted(set.begin(), set.end(), [](const Matching& a, const Matching& b) {
      return a.assignment < b.assignment;
    }));
    for (const Matching& x : set) CHECK(blocking_pairs(m, x).empty());
  }
}

TEST_CASE("blocking_pairs agrees with the definition on arbitrary matchings") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 1 + seed % 10;
    Rng rng(seed);
    const Market m = sample_market(n, rng);
    const Matching x{sample_permutation(n, rng), {}};
    CHECK(blocking_pairs(m, x).empty() == oracle::stable(m, x.assignment));
  }
}

TEST_CASE("DA endpoints are in the stable set and order average rank") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 1 + seed % 8;
    const Market m = sample_market(n, SeedSpec{seed, 2});
    const StableSet set = enumerate_stable(m);
    const Matching so = da_students(m, m.preferences()).matching;
    const Matching sc = da_schools(m).matching;
    CHECK(std::find(set.begin(), set.end(), so) != set.end());
    CHECK(std::find(set.begin(), set.end(), sc) != set.end());
    const auto lo = metrics(m, so).rank_sum;
    const auto hi = metrics(m, sc).rank_sum;
    for (const Matching& x : set) {
      CHECK(lo <= metrics(m, x).rank_sum);
      CHECK(metrics(m, x).rank_sum <= hi);
    }
  }
}
