#include "petrec/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace petrec {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : base_(mix64(seed ^ mix64(stream * kGolden + 1))) {}

std::uint64_t CounterRng::next_u64() {
  ++counter_;
  return mix64(base_ + kGolden * counter_);
}

double CounterRng::next_u01() {
  const std::uint64_t z = next_u64();
  return static_cast<double>(z >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

namespace {

// Stirling-series log(k!) so sampling does not depend on the platform's
// lgamma. Exact table for small k, series elsewhere (|error| < 1e-12).
double log_factorial(long k) {
  static const double table[] = {
      0.0,
      0.0,
      0.6931471805599453,
      1.791759469228055,
      3.1780538303479458,
      4.787491742782046,
      6.579251212010101,
      8.525161361065415,
      10.60460290274525,
      12.801827480081469};
  if (k < 10) return table[k];
  const double x = static_cast<double>(k) + 1.0;
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // log Gamma(x) for x >= 11
  return (x - 0.5) * std::log(x) - x + 0.9189385332046727 +
         inv * (1.0 / 12.0 + inv2 * (-1.0 / 360.0 + inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
}

long poisson_inversion(double mean, CounterRng& rng) {
  const double q = std::exp(-mean);
  double u = rng.next_u01();
  double p = q;
  long k = 0;
  while (u > p) {
    u -= p;
    ++k;
    p *= mean / static_cast<double>(k);
    if (k > 2000) break;  // u rounding guard; probability mass here is ~0
  }
  return k;
}

// Transformed rejection with squeeze (PTRS) for mean >= 30.
long poisson_ptrs(double mean, CounterRng& rng) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    const double u = rng.next_u01() - 0.5;
    const double v = rng.next_u01();
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<long>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const long k = static_cast<long>(kf);
    const double lhs = std::log(v * invalpha / (a / (us * us) + b));
    const double rhs = -mean + kf * loglam - log_factorial(k);
    if (lhs <= rhs) return k;
  }
}

}  // namespace

long poisson_sample(double mean, CounterRng& rng) {
  if (!(mean >= 0.0) || !std::isfinite(mean))
    throw std::invalid_argument("poisson_sample: mean must be finite and nonnegative");
  if (mean == 0.0) return 0;
  if (mean < 30.0) return poisson_inversion(mean, rng);
  return poisson_ptrs(mean, rng);
}

}  // namespace petrec
