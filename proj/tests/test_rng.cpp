#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "qerc/rng.hpp"

using qerc::rng::RandomSeed;
using qerc::rng::SplitMix64;

TEST_CASE("splitmix64 streams are deterministic per seed", "[rng]") {
  SplitMix64 a(RandomSeed{42}), b(RandomSeed{42}), c(RandomSeed{43});
  bool all_equal = true, any_differ = false;
  for (int i = 0; i < 1000; ++i) {
    const auto va = a.next_u64();
    all_equal &= (va == b.next_u64());
    any_differ |= (va != c.next_u64());
  }
  REQUIRE(all_equal);
  REQUIRE(any_differ);
}

TEST_CASE("open01 stays strictly inside (0,1)", "[rng]") {
  SplitMix64 gen(RandomSeed{7});
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double u = gen.next_open01();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  REQUIRE(lo > 0.0);
  REQUIRE(hi < 1.0);
}

TEST_CASE("box-muller normals have the right first two moments", "[rng]") {
  SplitMix64 gen(RandomSeed{11});
  const int n = 1000000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = gen.next_normal();
    sum += z;
    sum2 += z * z;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  REQUIRE(std::abs(mean) < 0.005);       // ~5 sigma of the mean estimator
  REQUIRE(std::abs(var - 1.0) < 0.01);
}

TEST_CASE("cauchy quartiles match the inverse CDF", "[rng]") {
  // quartiles of Cauchy(gamma) are at +-gamma; the median at 0
  SplitMix64 gen(RandomSeed{13});
  const double gamma = 0.04;
  std::vector<double> draws(200001);
  for (auto& d : draws) d = gen.next_cauchy(gamma);
  std::sort(draws.begin(), draws.end());
  REQUIRE(std::abs(draws[draws.size() / 2]) < 0.002);
  REQUIRE(std::abs(draws[draws.size() / 4] + gamma) < 0.002);
  REQUIRE(std::abs(draws[3 * draws.size() / 4] - gamma) < 0.002);
}

TEST_CASE("derived seeds decorrelate from their parent", "[rng]") {
  const RandomSeed base{1234};
  REQUIRE(base.derive(0).value != base.value);
  REQUIRE(base.derive(0).value != base.derive(1).value);
  REQUIRE(base.offset(3).value == 1237);
}
