#include "petrec/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <utility>

#include "petrec/grid_ops.hpp"

namespace petrec {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double inv_metric_sq(const Vec& x, const Vec& p) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) acc += x[j] * x[j] / p[j];
  return acc;
}

ThetaSequence make_theta(const MomentumSpec& spec) {
  switch (spec.kind) {
    case MomentumKind::none:
      return ThetaSequence::none();
    case MomentumKind::generalized:
      validate_gn_for_solver(spec.schedule);
      return ThetaSequence::generalized(spec.schedule);
    case MomentumKind::nesterov:
      return ThetaSequence::nesterov();
  }
  throw std::logic_error("unknown momentum kind");
}

void validate_common(const ReconProblem& prob, const Image& init,
                     const SolverOptions& opts) {
  if (prob.data.op == nullptr)
    throw std::invalid_argument("solver: problem has no system operator");
  if (init.v.size() != prob.data.op->cols())
    throw std::invalid_argument("solver: initial image does not match operator");
  if (opts.iterations < 0)
    throw std::invalid_argument("solver: iterations must be nonnegative");
  if (opts.reference != nullptr &&
      opts.reference->image.v.size() != init.v.size())
    throw std::invalid_argument("solver: reference image size mismatch");
}

void fill_reference_columns(TraceRow& row, const Image& cur, const Image& prev,
                            double t_curr, const Vec& p,
                            const ReferenceSolution* ref) {
  row.eta = kNaN;
  row.eps = kNaN;
  if (ref == nullptr) return;
  row.eta = row.phi - ref->phi;
  const Vec h = cur.v + (t_curr - 1.0) * (cur.v - prev.v);
  row.eps = 2.0 * t_curr * t_curr * row.eta + inv_metric_sq(h - ref->image.v, p);
}

void finish_row(TraceRow& row, const Image& cur, const Image& prev,
                double t_curr, const Vec& p, const SolverOptions& opts) {
  const double dn = (cur.v - prev.v).norm();
  const double cn = cur.v.norm();
  row.re = cn > 0.0 ? dn / cn : kNaN;
  row.tau = 0.5 * inv_metric_sq(cur.v - prev.v, p);
  fill_reference_columns(row, cur, prev, t_curr, p, opts.reference);
}

void maybe_snapshot(SolverTrace& trace, long i, const Image& f,
                    const SolverOptions& opts) {
  if (std::find(opts.snapshot_at.begin(), opts.snapshot_at.end(), i) !=
      opts.snapshot_at.end())
    trace.snapshots.emplace_back(i, f);
}

// Both proximal-gradient solvers share this loop; PPGA is the theta == 0
// instance. The preconditioner is refreshed from the current iterate for the
// first freeze_after steps and held fixed afterwards.
SolverTrace run_proximal_gradient(const ReconProblem& prob, const Image& init,
                                  const SolverOptions& opts) {
  validate_common(prob, init, opts);
  ThetaSequence theta = make_theta(opts.momentum);

  PreconditionerState pc =
      make_preconditioner(*prob.data.op, opts.beta, opts.freeze_after);
  if (opts.safety_rescale) {
    const LipschitzBound lb =
        lipschitz_upper_bound(prob.data, prob.weights, prob.smoothing);
    pc.safety = true;
    pc.l_hat = lb.value;
  }

  const auto start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
        .count();
  };

  SolverTrace trace;
  Image f_prev = prox_nonneg(init);
  Image f_cur = f_prev;
  em_preconditioner_update(pc, f_cur.v, 0);

  {
    TraceRow row;
    row.k = 0;
    row.phi = objective_value(f_cur, prob.data, prob.weights, prob.smoothing);
    row.tau = 0.0;
    row.re = kNaN;
    fill_reference_columns(row, f_cur, f_prev, theta.t_curr(), pc.p,
                           opts.reference);
    row.wall_ms = elapsed_ms();
    trace.rows.push_back(row);
  }
  if (!std::isfinite(trace.rows[0].phi)) {
    trace.aborted = true;
    trace.abort_reason = "objective not finite at the initial image";
  } else {
    if (opts.keep_iterates) trace.iterates.push_back(f_cur);
    maybe_snapshot(trace, 0, f_cur, opts);

    for (int i = 1; i <= opts.iterations; ++i) {
      const double th = theta.next();
      em_preconditioner_update(pc, f_cur.v, i - 1);

      const Image f_tilde(f_cur.n, f_cur.v + th * (f_cur.v - f_prev.v));
      Image f_next = t_operator(f_tilde, pc.p, prob);
      const double wall = elapsed_ms();
      if (!f_next.v.allFinite()) {
        trace.aborted = true;
        trace.abort_reason = "non-finite iterate at step " + std::to_string(i);
        break;
      }
      const double phi =
          objective_value(f_next, prob.data, prob.weights, prob.smoothing);
      if (!std::isfinite(phi)) {
        trace.aborted = true;
        trace.abort_reason =
            "objective not finite at step " + std::to_string(i);
        break;
      }

      TraceRow row;
      row.k = i;
      row.phi = phi;
      row.wall_ms = wall;
      finish_row(row, f_next, f_cur, theta.t_curr(), pc.p, opts);
      trace.rows.push_back(row);

      if (opts.keep_iterates) trace.iterates.push_back(f_next);
      maybe_snapshot(trace, i, f_next, opts);

      f_prev = std::move(f_cur);
      f_cur = std::move(f_next);
    }
  }

  trace.final_image = f_cur;
  trace.precond_final = pc.p;
  trace.p_max_final = pc.p_max;
  return trace;
}

// Shared primal-dual loop; FPPA is the theta == 0 instance. The duals enter
// the image step through the difference-operator adjoints and advance by the
// Moreau complement of the group shrinkage.
SolverTrace run_primal_dual(const ReconProblem& prob, const Image& init,
                            double rho1, double rho2,
                            const SolverOptions& opts) {
  validate_common(prob, init, opts);
  ThetaSequence theta = make_theta(opts.momentum);

  PreconditionerState pc =
      make_preconditioner(*prob.data.op, opts.beta, opts.freeze_after);

  const auto start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
        .count();
  };

  SolverTrace trace;
  Image f_prev = prox_nonneg(init);
  Image f_cur = f_prev;
  em_preconditioner_update(pc, f_cur.v, 0);

  if (rho1 <= 0.0) rho1 = 1.0 / (2.0 * kFirstDiffOpNormSq * pc.p_max);
  if (rho2 <= 0.0) rho2 = 1.0 / (2.0 * kSecondDiffOpNormSq * pc.p_max);

  const int n = f_cur.n;
  FirstOrderField b(n), b_prev(n);
  SecondOrderField c(n), c_prev(n);

  {
    TraceRow row;
    row.k = 0;
    row.phi = objective_value_nonsmooth(f_cur, prob.data, prob.weights);
    row.tau = 0.0;
    row.re = kNaN;
    fill_reference_columns(row, f_cur, f_prev, theta.t_curr(), pc.p,
                           opts.reference);
    row.wall_ms = elapsed_ms();
    trace.rows.push_back(row);
  }
  if (!std::isfinite(trace.rows[0].phi)) {
    trace.aborted = true;
    trace.abort_reason = "objective not finite at the initial image";
  } else {
    if (opts.keep_iterates) trace.iterates.push_back(f_cur);
    maybe_snapshot(trace, 0, f_cur, opts);

    for (int i = 1; i <= opts.iterations; ++i) {
      const double th = theta.next();
      em_preconditioner_update(pc, f_cur.v, i - 1);

      const Image f_tilde(n, f_cur.v + th * (f_cur.v - f_prev.v));
      const FirstOrderField b_tilde(n, b.v + th * (b.v - b_prev.v));
      const SecondOrderField c_tilde(n, c.v + th * (c.v - c_prev.v));

      Vec step = fidelity_grad(f_tilde, prob.data).v;
      step += apply_first_diff_adjoint(b_tilde).v;
      step += apply_second_diff_adjoint(c_tilde).v;
      Image f_next(n, (f_tilde.v - pc.p.cwiseProduct(step)).cwiseMax(0.0));
      const double wall = elapsed_ms();
      if (!f_next.v.allFinite()) {
        trace.aborted = true;
        trace.abort_reason = "non-finite iterate at step " + std::to_string(i);
        break;
      }

      const Image reflect(n, 2.0 * f_next.v - f_tilde.v);
      FirstOrderField arg1 = apply_first_diff(reflect);
      arg1.v += b_tilde.v / rho1;
      const FirstOrderField shrunk1 =
          prox_group_l2(arg1, prob.weights.lambda1 / rho1);
      FirstOrderField b_next(n, rho1 * (arg1.v - shrunk1.v));

      SecondOrderField arg2 = apply_second_diff(reflect);
      arg2.v += c_tilde.v / rho2;
      const SecondOrderField shrunk2 =
          prox_group_l2(arg2, prob.weights.lambda2 / rho2);
      SecondOrderField c_next(n, rho2 * (arg2.v - shrunk2.v));

      if (!b_next.v.allFinite() || !c_next.v.allFinite()) {
        trace.aborted = true;
        trace.abort_reason = "non-finite dual at step " + std::to_string(i);
        break;
      }

      const double phi =
          objective_value_nonsmooth(f_next, prob.data, prob.weights);
      if (!std::isfinite(phi)) {
        trace.aborted = true;
        trace.abort_reason =
            "objective not finite at step " + std::to_string(i);
        break;
      }

      TraceRow row;
      row.k = i;
      row.phi = phi;
      row.wall_ms = wall;
      finish_row(row, f_next, f_cur, theta.t_curr(), pc.p, opts);
      trace.rows.push_back(row);

      if (opts.keep_iterates) trace.iterates.push_back(f_next);
      maybe_snapshot(trace, i, f_next, opts);

      f_prev = std::move(f_cur);
      f_cur = std::move(f_next);
      b_prev = std::move(b);
      b = std::move(b_next);
      c_prev = std::move(c);
      c = std::move(c_next);
    }
  }

  trace.final_image = f_cur;
  trace.precond_final = pc.p;
  trace.p_max_final = pc.p_max;
  trace.dual_b = b.v;
  trace.dual_c = c.v;
  return trace;
}

}  // namespace

Image t_operator(const Image& f, const Vec& p, const ReconProblem& prob) {
  if (p.size() != f.v.size())
    throw std::invalid_argument("t_operator: diagonal size mismatch");
  const Image grad =
      objective_grad(f, prob.data, prob.weights, prob.smoothing);
  return Image(f.n, (f.v - p.cwiseProduct(grad.v)).cwiseMax(0.0));
}

SolverTrace run_ppga(const ReconProblem& prob, const Image& init,
                     const SolverOptions& opts) {
  SolverOptions plain = opts;
  plain.momentum = MomentumSpec{};
  return run_proximal_gradient(prob, init, plain);
}

SolverTrace run_appga(const ReconProblem& prob, const Image& init,
                      const SolverOptions& opts) {
  return run_proximal_gradient(prob, init, opts);
}

SolverTrace run_fppa(const ReconProblem& prob, const Image& init, double rho1,
                     double rho2, const SolverOptions& opts) {
  SolverOptions plain = opts;
  plain.momentum = MomentumSpec{};
  return run_primal_dual(prob, init, rho1, rho2, plain);
}

SolverTrace run_afppa(const ReconProblem& prob, const Image& init, double rho1,
                      double rho2, const SolverOptions& opts) {
  return run_primal_dual(prob, init, rho1, rho2, opts);
}

LyapunovReport lyapunov_diagnostics(const std::vector<Image>& iterates,
                                    const ReconProblem& prob,
                                    const GNSchedule& schedule, const Vec& p,
                                    const ReferenceSolution& reference) {
  if (iterates.size() < 2)
    throw std::invalid_argument(
        "lyapunov_diagnostics: need the stored iterate history (at least two "
        "images)");
  if (p.size() != iterates[0].v.size())
    throw std::invalid_argument("lyapunov_diagnostics: diagonal size mismatch");
  if (reference.image.v.size() != iterates[0].v.size())
    throw std::invalid_argument("lyapunov_diagnostics: reference size mismatch");

  const long m = static_cast<long>(iterates.size());
  LyapunovReport rep;
  rep.eta.resize(static_cast<size_t>(m));
  rep.tau.resize(static_cast<size_t>(m));
  rep.eps.resize(static_cast<size_t>(m));
  rep.t.resize(static_cast<size_t>(m));
  rep.h.reserve(static_cast<size_t>(m));

  for (long i = 0; i < m; ++i) {
    const Image& cur = iterates[static_cast<size_t>(i)];
    const Image& prev = iterates[static_cast<size_t>(i == 0 ? 0 : i - 1)];
    const double t = gn_t(schedule, i);
    const size_t si = static_cast<size_t>(i);
    rep.t[si] = t;
    rep.eta[si] =
        objective_value(cur, prob.data, prob.weights, prob.smoothing) -
        reference.phi;
    rep.tau[si] = 0.5 * inv_metric_sq(cur.v - prev.v, p);
    Vec hv = cur.v + (t - 1.0) * (cur.v - prev.v);
    rep.eps[si] = 2.0 * t * t * rep.eta[si] +
                  inv_metric_sq(hv - reference.image.v, p);
    rep.h.emplace_back(cur.n, std::move(hv));
  }

  rep.eps_first = rep.eps[0];
  const double slack = 1e-8 * std::abs(rep.eps[0]);

  // Largest suffix on which eps never increases beyond the slack.
  long k0 = m - 1;
  for (long i = m - 2; i >= 0; --i) {
    if (rep.eps[static_cast<size_t>(i + 1)] <=
        rep.eps[static_cast<size_t>(i)] + slack)
      k0 = i;
    else
      break;
  }
  if (k0 <= m - 2) rep.detected_K = k0;
  rep.eps_monotone_tail = k0 <= m - 1 - 10;

  if (rep.detected_K >= 0) {
    rep.eta_bound_holds = true;
    for (long i = rep.detected_K + 1; i < m; ++i) {
      const size_t si = static_cast<size_t>(i);
      const double bound = rep.eps[si] / (2.0 * rep.t[si] * rep.t[si]);
      if (rep.eta[si] > bound + 1e-12 * std::max(1.0, std::abs(bound))) {
        rep.eta_bound_holds = false;
        break;
      }
    }
  }

  double sum = 0.0;
  for (long i = 0; i < m; ++i) {
    const double t_next = gn_t(schedule, i + 1);
    const double weight = rep.t[static_cast<size_t>(i)] *
                              rep.t[static_cast<size_t>(i)] -
                          t_next * (t_next - 1.0);
    sum += weight * rep.eta[static_cast<size_t>(i)];
  }
  rep.weighted_eta_sum = sum;
  rep.sum_bound_holds = sum <= 0.5 * rep.eps_first + 1e-8 * std::abs(rep.eps_first);

  return rep;
}

std::string LyapunovReport::summary() const {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof(buf), "lyapunov certificate over %zu rows:\n",
                eps.size());
  out += buf;
  if (detected_K >= 0)
    std::snprintf(buf, sizeof(buf),
                  "  eps nonincreasing from row %ld (tail %s)\n", detected_K,
                  eps_monotone_tail ? "long enough" : "too short");
  else
    std::snprintf(buf, sizeof(buf), "  no monotone eps tail detected\n");
  out += buf;
  std::snprintf(buf, sizeof(buf), "  eta <= eps/(2 t^2) past K: %s\n",
                eta_bound_holds ? "yes" : "no");
  out += buf;
  std::snprintf(buf, sizeof(buf),
                "  weighted eta sum %.6g vs bound %.6g: %s\n", weighted_eta_sum,
                0.5 * eps_first, sum_bound_holds ? "within" : "exceeded");
  out += buf;
  return out;
}

}  // namespace petrec
