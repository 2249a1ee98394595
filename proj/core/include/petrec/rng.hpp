#pragma once

#include <cstdint>

namespace petrec {

// 64-bit finalizer used to build the counter-based generator below.
std::uint64_t mix64(std::uint64_t z);

// Counter-based generator: the nth draw is a pure function of
// (seed, stream, n), so concurrent consumers keyed by stream id produce
// identical values regardless of evaluation order or thread count.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  // Uniform in the open interval (0, 1); 53-bit resolution.
  double next_u01();

 private:
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

// Deterministic Poisson draw using inversion by sequential search for small
// means and the PTRS transformed-rejection method for large ones. Consumes a
// variable number of uniforms from rng.
long poisson_sample(double mean, CounterRng& rng);

}  // namespace petrec
