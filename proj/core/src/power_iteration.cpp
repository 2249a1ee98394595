#include "petrec/power_iteration.hpp"

#include <cmath>

#include "petrec/rng.hpp"

namespace petrec {

PowerIterationResult estimate_op_norm_sq(const LinearMap& op, double tol, int max_iterations,
                                         std::uint64_t seed) {
  PowerIterationResult res;
  const Eigen::Index d = op.cols();
  CounterRng rng(seed, static_cast<std::uint64_t>(d));
  Vec v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = rng.next_u01() - 0.5;
  double vn = v.norm();
  if (vn == 0.0) return res;
  v /= vn;

  double prev = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    Vec w = op.apply_adjoint(op.apply(v));
    const double lam = v.dot(w);  // Rayleigh quotient for A^T A
    res.iterations = it;
    res.norm_sq = lam;
    const double wn = w.norm();
    if (wn == 0.0) {
      // v landed in the null space; the operator restricted to this start is 0
      res.norm_sq = 0.0;
      res.converged = true;
      return res;
    }
    if (it > 1 && std::abs(lam - prev) <= tol * std::max(std::abs(lam), 1e-300)) {
      res.converged = true;
      return res;
    }
    prev = lam;
    v = w / wn;
  }
  return res;
}

}  // namespace petrec
