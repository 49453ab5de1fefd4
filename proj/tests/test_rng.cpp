#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "msfl/rng.hpp"

using namespace msfl;

TEST_SUITE("rng") {

TEST_CASE("mix_seed stream zero is the identity") {
  for (std::uint64_t s : {0ull, 1ull, 42ull, 0xdeadbeefull, ~0ull})
    CHECK(mix_seed(s, 0) == s);
}

TEST_CASE("mix_seed streams do not collide") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s : {0ull, 7ull, 123456789ull})
    for (std::uint64_t k = 0; k < 200; ++k)
      seen.insert(mix_seed(s, k));
  CHECK(seen.size() == 3 * 200);
}

TEST_CASE("equal seeds give bitwise equal streams") {
  Rng a(99), b(99);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  Rng c(99), d(100);
  int same = 0;
  for (int i = 0; i < 100; ++i) same += c.next_u64() == d.next_u64();
  CHECK(same < 5);
}

TEST_CASE("uniform covers [0,1) with the right mean") {
  Rng rng(1);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("uniform_int stays in range and hits every value") {
  Rng rng(2);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const std::uint64_t k = rng.uniform_int(7);
    REQUIRE(k < 7);
    ++counts[static_cast<int>(k)];
  }
  for (int c : counts) CHECK(c > 700);
}

TEST_CASE("normal has zero mean and unit variance") {
  Rng rng(3);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(sq / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("shuffle permutes") {
  Rng rng(4);
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  std::vector<int> orig = v;
  rng.shuffle(v);
  CHECK(v != orig);
  std::sort(v.begin(), v.end());
  CHECK(v == orig);
}

}  // TEST_SUITE
