#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "petrec/rng.hpp"

using namespace petrec;

TEST_CASE("counter generator is deterministic per (seed, stream)") {
  CounterRng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  std::vector<std::uint64_t> sa, sb;
  bool stream_differs = false, seed_differs = false;
  for (int i = 0; i < 64; ++i) {
    const auto va = a.next_u64();
    sa.push_back(va);
    sb.push_back(b.next_u64());
    if (va != c.next_u64()) stream_differs = true;
    if (va != d.next_u64()) seed_differs = true;
  }
  CHECK(sa == sb);
  CHECK(stream_differs);
  CHECK(seed_differs);
}

TEST_CASE("uniform doubles stay inside the open unit interval") {
  CounterRng rng(1, 0);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.next_u01();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(lo < 0.01);   // the sample actually explores the interval
  CHECK(hi > 0.99);
}

TEST_CASE("poisson sampling tracks mean and variance in both regimes") {
  for (double mean : {0.5, 4.0, 25.0, 80.0, 1200.0}) {
    CounterRng rng(2024, static_cast<std::uint64_t>(mean * 100));
    const int trials = 20000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < trials; ++i) {
      const double x = static_cast<double>(poisson_sample(mean, rng));
      CHECK(x >= 0.0);
      sum += x;
      sum_sq += x * x;
    }
    const double avg = sum / trials;
    const double var = sum_sq / trials - avg * avg;
    // 5 sigma of the sample mean, plus a wide variance band
    const double mean_tol = 5.0 * std::sqrt(mean / trials);
    CHECK(std::abs(avg - mean) <= mean_tol);
    CHECK(var > 0.85 * mean);
    CHECK(var < 1.15 * mean);
  }
}

TEST_CASE("poisson edge cases") {
  CounterRng rng(5, 5);
  CHECK(poisson_sample(0.0, rng) == 0);
  CHECK_THROWS_AS(poisson_sample(-1.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(poisson_sample(std::nan(""), rng), std::invalid_argument);
}

TEST_CASE("small-mean poisson histogram matches the pmf") {
  CounterRng rng(99, 3);
  const double mean = 2.0;
  const int trials = 200000;
  std::vector<int> hist(12, 0);
  for (int i = 0; i < trials; ++i) {
    const auto k = poisson_sample(mean, rng);
    if (k < static_cast<long long>(hist.size())) ++hist[static_cast<size_t>(k)];
  }
  double pmf = std::exp(-mean);  // P(k=0), then recurrence pmf *= mean/k
  for (int k = 0; k < 8; ++k) {
    const double expected = pmf * trials;
    CHECK(std::abs(hist[static_cast<size_t>(k)] - expected) <=
          5.0 * std::sqrt(expected) + 5.0);
    pmf *= mean / (k + 1);
  }
}
