#pragma once

#include <cstdint>

#include "petrec/types.hpp"

namespace petrec {

struct PowerIterationResult {
  double norm_sq = 0.0;  // estimate of the largest eigenvalue of A^T A
  int iterations = 0;
  bool converged = false;
};

// Estimates ||A||_2^2 by power iteration on A^T A from a deterministic
// pseudo-random start vector. Convergence is declared when the Rayleigh
// quotient changes by at most tol (relative) between sweeps.
PowerIterationResult estimate_op_norm_sq(const LinearMap& op, double tol = 1e-6,
                                         int max_iterations = 1000,
                                         std::uint64_t seed = 2024);

}  // namespace petrec
