#pragma once

#include <string>
#include <vector>

#include "petrec/objective.hpp"
#include "petrec/precond.hpp"
#include "petrec/schedules.hpp"
#include "petrec/trace.hpp"
#include "petrec/types.hpp"

namespace petrec {

struct ReconProblem {
  PoissonData data;
  RegWeights weights;
  SmoothingParams smoothing;
};

enum class MomentumKind { none, generalized, nesterov };

struct MomentumSpec {
  MomentumKind kind = MomentumKind::none;
  GNSchedule schedule;  // used when kind == generalized
};

// Known (or long-run surrogate) minimizer for convergence diagnostics. phi
// must be the objective value at image under the same model the solver
// optimizes: smoothed for the proximal gradient solvers, nonsmooth for the
// primal-dual ones.
struct ReferenceSolution {
  Image image;
  double phi = 0.0;
};

struct SolverOptions {
  int iterations = 100;
  double beta = 1.0;
  int freeze_after = 50;
  // Cap p_max at 1/L with L from lipschitz_upper_bound. Off by default: the
  // plain EM scaling is what makes early iterations fast, and the cap mostly
  // matters when a certified descent is needed (reference runs, fixed-point
  // tests).
  bool safety_rescale = false;
  MomentumSpec momentum;
  bool keep_iterates = false;
  std::vector<long> snapshot_at;
  const ReferenceSolution* reference = nullptr;
};

// One proximal gradient step in the diagonal metric: projection of
// f - P * grad onto the nonnegative orthant, with grad the gradient of the
// smooth (fidelity + smoothed regularizer) objective.
Image t_operator(const Image& f, const Vec& p, const ReconProblem& prob);

// Proximal gradient iteration f^{k+1} = T f^k with the EM preconditioner.
SolverTrace run_ppga(const ReconProblem& prob, const Image& init,
                     const SolverOptions& opts);

// Accelerated variant: f^{k+1} = T(f^k + theta_k (f^k - f^{k-1})). With
// momentum kind none this reproduces run_ppga exactly.
SolverTrace run_appga(const ReconProblem& prob, const Image& init,
                      const SolverOptions& opts);

// Primal-dual solvers for the nonsmooth model. The image update is a
// preconditioned gradient step on the fidelity plus the dual feedback
// B1^T b + B2^T c; the duals advance through the shrinkage prox via the
// Moreau identity. Nonpositive rho arguments select 1/(2*8*p_max) and
// 1/(2*64*p_max) from the initial preconditioner. Trace phi columns hold the
// nonsmooth objective; safety_rescale has no effect here (the step-size
// theory of this scheme runs through rho, not a curvature cap).
SolverTrace run_fppa(const ReconProblem& prob, const Image& init, double rho1,
                     double rho2, const SolverOptions& opts);

// FPPA with the primal and both dual variables extrapolated by theta_k.
// No convergence certificate is claimed for this scheme; it is provided for
// empirical comparison and its momentum may be any of the three kinds.
SolverTrace run_afppa(const ReconProblem& prob, const Image& init, double rho1,
                      double rho2, const SolverOptions& opts);

// Convergence certificates recomputed from stored iterates in the fixed
// metric induced by p (use the frozen diagonal of the run). Row i of every
// vector describes the iterate reached after i + 1 steps, matching trace
// rows. The checks mirror the descent theory:
//   monotone:    eps[i+1] <= eps[i] + 1e-8*eps[0] for all i >= detected_K,
//   eta_bound:   eta[i] <= eps[i] / (2 t_i^2) past detected_K,
//   sum_bound:   sum of [t_i^2 - t_{i+1}(t_{i+1}-1)] * eta[i] <= eps[0]/2.
struct LyapunovReport {
  std::vector<double> eta;
  std::vector<double> tau;
  std::vector<double> eps;
  std::vector<double> t;       // t_i per row
  std::vector<Image> h;        // extrapolated comparison points
  long detected_K = -1;        // -1 when no monotone tail exists
  bool eps_monotone_tail = false;
  bool eta_bound_holds = false;
  double weighted_eta_sum = 0.0;
  double eps_first = 0.0;
  bool sum_bound_holds = false;
  std::string summary() const;
};

// iterates[0] is the initial image, iterates[i] the result of step i, as
// stored by the solvers under keep_iterates. Throws std::invalid_argument
// when fewer than two iterates are supplied.
LyapunovReport lyapunov_diagnostics(const std::vector<Image>& iterates,
                                    const ReconProblem& prob,
                                    const GNSchedule& schedule, const Vec& p,
                                    const ReferenceSolution& reference);

}  // namespace petrec
