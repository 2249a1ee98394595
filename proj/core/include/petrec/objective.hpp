#pragma once

#include "petrec/grid_ops.hpp"
#include "petrec/types.hpp"

namespace petrec {

struct SmoothingParams {
  double epsilon = 1e-3;
};

struct RegWeights {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

// Count data with known background mean. The operator maps an image to
// expected true counts (any attenuation or count scaling is already folded
// into it); the background must be strictly positive so both log(Af+gamma)
// and g/(Af+gamma) stay finite on the nonnegative orthant. A supplied
// background with nonpositive entries is floored at 1e-12 times its mean
// with a warning on stderr.
struct PoissonData {
  const LinearMap* op = nullptr;
  Vec counts;
  Vec background;

  PoissonData() = default;
  PoissonData(const LinearMap& system, Vec g, Vec gamma);

  Eigen::Index bins() const { return counts.size(); }
};

// Smoothed l2 norm: ||x|| - eps/2 outside the eps-ball, quadratic inside.
double smoothed_l2(const Eigen::Ref<const Vec>& x, double eps);
// Its gradient x / max(||x||, eps); norm never exceeds 1.
Vec smoothed_l2_grad(const Eigen::Ref<const Vec>& x, double eps);

// Sum of smoothed group norms of the first- and second-order differences,
// weighted by lambda1/lambda2. Groups pair index i with i+d (first order)
// and the four second-order blocks at index i.
double shoitv_value(const Image& img, const RegWeights& w, const SmoothingParams& s);
Image shoitv_grad(const Image& img, const RegWeights& w, const SmoothingParams& s);

// Nonsmooth counterpart (plain group l2 norms, no smoothing).
double hoitv_value(const Image& img, const RegWeights& w);

// Poisson negative log likelihood <Af,1> - <log(Af+gamma), g> and its
// gradient A^T(1 - g/(Af+gamma)).
double fidelity_value(const Image& img, const PoissonData& data);
Image fidelity_grad(const Image& img, const PoissonData& data);

// Full objective including the nonnegativity indicator: +infinity for any
// image with a negative entry (exact zero tolerance), otherwise
// fidelity + smoothed regularizer.
double objective_value(const Image& img, const PoissonData& data, const RegWeights& w,
                       const SmoothingParams& s);
// Same with the nonsmooth regularizer.
double objective_value_nonsmooth(const Image& img, const PoissonData& data, const RegWeights& w);

// Gradient of the smooth part (fidelity + smoothed regularizer).
Image objective_grad(const Image& img, const PoissonData& data, const RegWeights& w,
                     const SmoothingParams& s);

// Groupwise shrinkage: the proximity operator of threshold * (sum of group
// l2 norms). Groups with norm <= threshold collapse to zero exactly.
FirstOrderField prox_group_l2(const FirstOrderField& field, double threshold);
SecondOrderField prox_group_l2(const SecondOrderField& field, double threshold);

// Componentwise projection onto the nonnegative orthant; independent of any
// positive diagonal metric.
Image prox_nonneg(const Image& img);

struct LipschitzBound {
  double value = 0.0;
  double a_norm_sq = 0.0;
  double b1_norm_sq = 0.0;
  double b2_norm_sq = 0.0;
};

// Conservative global Lipschitz constant of the smooth objective gradient:
//   ||A||^2 * max_i(g_i / gamma_i^2) + (2/eps) * (lambda1*||B1||^2 + lambda2*||B2||^2)
// with the operator norms estimated by power iteration. Throws if the power
// iteration fails to converge (message carries the partial estimate).
LipschitzBound lipschitz_upper_bound(const PoissonData& data, const RegWeights& w,
                                     const SmoothingParams& s);

}  // namespace petrec
