#pragma once

#include "petrec/types.hpp"

namespace petrec {

// Diagonal EM-style preconditioner p_j = beta * f_j / Lambda_j with
// Lambda = A^T 1 (sensitivity image). The diagonal tracks the iterate for
// the first freeze_after updates and is held fixed afterwards, which keeps
// the fixed-point analysis of the solver valid while preserving the fast
// early progress of the EM scaling.
struct PreconditionerState {
  Vec lambda;            // sensitivity, zeros replaced by 1
  double beta = 1.0;
  int freeze_after = 50;
  bool safety = false;   // cap p_max at 1/l_hat when enabled
  double l_hat = 0.0;    // curvature bound used by the cap
  Vec p;                 // current diagonal, empty until the first update
  double p_max = 0.0;
};

PreconditionerState make_preconditioner(const LinearMap& op, double beta,
                                        int freeze_after);

// Recompute the diagonal from the current iterate when k < freeze_after (or
// when the diagonal has never been computed). Entries of f are floored at
// 1e-8 times the mean over the positive entries so the diagonal stays
// strictly positive; a wholly nonpositive iterate falls back to an absolute
// floor of 1e-8.
void em_preconditioner_update(PreconditionerState& state, const Vec& f, long k);

}  // namespace petrec
