#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "emt/rng.hpp"

using emt::derive_stream;

TEST_CASE("derive_stream matches the recorded test vector") {
  std::ifstream in(EMT_GOLDEN_DIR "/derive_stream.txt");
  REQUIRE(in.good());
  std::string line;
  int checked = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
    std::uint64_t expected = 0;
    REQUIRE(std::sscanf(line.c_str(), "%lu %lu %lx", &seed, &index, &expected) == 3);
    CHECK(derive_stream(seed, index) == expected);
    ++checked;
  }
  CHECK(checked >= 1);
}

TEST_CASE("derive_stream is a pure function") {
  for (std::uint64_t i = 0; i < 100; ++i) CHECK(derive_stream(12345, i) == derive_stream(12345, i));
}

TEST_CASE("derive_stream has no collisions over a million indices") {
  for (std::uint64_t seed : {std::uint64_t{0}, std::uint64_t{42}, ~std::uint64_t{0}}) {
    std::vector<std::uint64_t> children;
    children.reserve(1'000'000);
    for (std::uint64_t i = 0; i < 1'000'000; ++i) children.push_back(derive_stream(seed, i));
    std::sort(children.begin(), children.end());
    CHECK(std::adjacent_find(children.begin(), children.end()) == children.end());
  }
}

TEST_CASE("unit_open stays strictly inside (0, 1)") {
  CHECK(emt::unit_open(0) > 0.0);
  CHECK(emt::unit_open(~std::uint64_t{0}) < 1.0);
  CHECK(emt::unit_open(std::uint64_t{1} << 63) == doctest::Approx(0.5));
}

TEST_CASE("Rng streams are reproducible and seed-dependent") {
  emt::Rng a(derive_stream(7, 0));
  emt::Rng b(derive_stream(7, 0));
  emt::Rng c(derive_stream(7, 1));
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    differs = differs || x != c.uniform();
  }
  CHECK(differs);
}

TEST_CASE("Rng exponential and poisson have the right means") {
  emt::Rng rng(derive_stream(3, 0));
  const int n = 200000;
  double sum_exp = 0.0;
  double sum_poi = 0.0;
  for (int i = 0; i < n; ++i) {
    sum_exp += rng.exponential(2.0);
    sum_poi += static_cast<double>(rng.poisson(4.0));
  }
  // 4 sigma bands: sd(Exp(2)) = 0.5, sd(Poisson(4)) = 2.
  CHECK(std::abs(sum_exp / n - 0.5) < 4.0 * 0.5 / std::sqrt(n));
  CHECK(std::abs(sum_poi / n - 4.0) < 4.0 * 2.0 / std::sqrt(n));
  CHECK(rng.poisson(0.0) == 0);
}
