#include "petrec/precond.hpp"

#include <algorithm>
#include <stdexcept>

namespace petrec {

PreconditionerState make_preconditioner(const LinearMap& op, double beta,
                                        int freeze_after) {
  if (!(beta > 0.0))
    throw std::invalid_argument("make_preconditioner: beta must be positive");
  if (freeze_after < 0)
    throw std::invalid_argument("make_preconditioner: freeze_after must be nonnegative");

  PreconditionerState state;
  state.beta = beta;
  state.freeze_after = freeze_after;
  state.lambda = op.apply_adjoint(Vec::Ones(op.rows()));
  for (Eigen::Index j = 0; j < state.lambda.size(); ++j)
    if (!(state.lambda[j] > 0.0)) state.lambda[j] = 1.0;
  return state;
}

void em_preconditioner_update(PreconditionerState& state, const Vec& f, long k) {
  if (f.size() != state.lambda.size())
    throw std::invalid_argument("em_preconditioner_update: iterate size mismatch");
  const bool initialized = state.p.size() == f.size();
  if (initialized && k >= state.freeze_after) return;

  double mean_pos = 0.0;
  Eigen::Index n_pos = 0;
  for (Eigen::Index j = 0; j < f.size(); ++j) {
    if (f[j] > 0.0) {
      mean_pos += f[j];
      ++n_pos;
    }
  }
  const double floor = n_pos > 0 ? 1e-8 * (mean_pos / static_cast<double>(n_pos)) : 1e-8;

  state.p.resize(f.size());
  double p_max = 0.0;
  for (Eigen::Index j = 0; j < f.size(); ++j) {
    state.p[j] = state.beta * std::max(f[j], floor) / state.lambda[j];
    p_max = std::max(p_max, state.p[j]);
  }
  state.p_max = p_max;

  if (state.safety && state.l_hat > 0.0 && state.p_max > 1.0 / state.l_hat) {
    state.p *= 1.0 / (state.l_hat * state.p_max);
    state.p_max = 1.0 / state.l_hat;
  }
}

}  // namespace petrec
