#include <cmath>
#include <random>

#include <doctest.h>

#include "ideabench/errors.hpp"
#include "ideabench/rng.hpp"

using namespace ideabench;

TEST_CASE("fnv1a64 matches the published test vectors") {
  CHECK(rng::fnv1a64("") == 14695981039346656037ull);
  CHECK(rng::fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(rng::fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("bounded draws stay in range and reject m = 0") {
  std::mt19937_64 gen(7);
  for (int i = 0; i < 2000; ++i) {
    CHECK(rng::bounded(gen, 13) < 13);
  }
  CHECK(rng::bounded(gen, 1) == 0);
  CHECK_THROWS_AS(rng::bounded(gen, 0), DomainError);
}

TEST_CASE("bounded is deterministic for a fixed seed") {
  std::mt19937_64 a(42);
  std::mt19937_64 b(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(rng::bounded(a, 97) == rng::bounded(b, 97));
  }
}

TEST_CASE("unit_open lies in (0, 1]") {
  std::mt19937_64 gen(3);
  for (int i = 0; i < 5000; ++i) {
    double u = rng::unit_open(gen);
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
  }
}

TEST_CASE("standard_normal has the expected first two moments") {
  std::mt19937_64 gen(11);
  const int n = 200000;
  double sum = 0.0;
  double sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = rng::standard_normal(gen);
    sum += x;
    sumsq += x * x;
  }
  double mean = sum / n;
  double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("standard_normal is a pure function of the generator state") {
  std::mt19937_64 a(5);
  std::mt19937_64 b(5);
  for (int i = 0; i < 50; ++i) {
    CHECK(rng::standard_normal(a) == rng::standard_normal(b));
  }
}
