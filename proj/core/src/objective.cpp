#include "petrec/objective.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

#include "petrec/power_iteration.hpp"

namespace petrec {

PoissonData::PoissonData(const LinearMap& system, Vec g, Vec gamma)
    : op(&system), counts(std::move(g)), background(std::move(gamma)) {
  if (counts.size() != system.rows() || background.size() != system.rows())
    throw std::invalid_argument("PoissonData: sinogram size does not match operator rows");
  if ((counts.array() < 0.0).any())
    throw std::invalid_argument("PoissonData: counts must be nonnegative");
  if ((background.array() <= 0.0).any()) {
    const double mean = background.mean();
    if (mean <= 0.0)
      throw std::invalid_argument("PoissonData: background must have positive mass");
    const double floor = 1e-12 * mean;
    std::cerr << "warning: flooring nonpositive background bins at " << floor << "\n";
    background = background.cwiseMax(floor);
  }
}

double smoothed_l2(const Eigen::Ref<const Vec>& x, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("smoothed_l2: eps must be positive");
  const double nrm = x.norm();
  if (nrm > eps) return nrm - eps / 2.0;
  return nrm * nrm / (2.0 * eps);
}

Vec smoothed_l2_grad(const Eigen::Ref<const Vec>& x, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("smoothed_l2_grad: eps must be positive");
  return x / std::max(x.norm(), eps);
}

namespace {

inline double group_value_2(double u, double v, double eps) {
  const double nrm = std::sqrt(u * u + v * v);
  return nrm > eps ? nrm - eps / 2.0 : nrm * nrm / (2.0 * eps);
}

inline double group_value_4(double a, double b, double c, double e, double eps) {
  const double nrm = std::sqrt(a * a + b * b + c * c + e * e);
  return nrm > eps ? nrm - eps / 2.0 : nrm * nrm / (2.0 * eps);
}

}  // namespace

double shoitv_value(const Image& img, const RegWeights& w, const SmoothingParams& s) {
  if (s.epsilon <= 0.0) throw std::invalid_argument("shoitv_value: eps must be positive");
  const int d = img.d();
  double acc = 0.0;
  if (w.lambda1 != 0.0) {
    const FirstOrderField u = apply_first_diff(img);
    double sum = 0.0;
    for (int i = 0; i < d; ++i) sum += group_value_2(u.v[i], u.v[d + i], s.epsilon);
    acc += w.lambda1 * sum;
  }
  if (w.lambda2 != 0.0) {
    const SecondOrderField c = apply_second_diff(img);
    double sum = 0.0;
    for (int i = 0; i < d; ++i)
      sum += group_value_4(c.v[i], c.v[d + i], c.v[2 * d + i], c.v[3 * d + i], s.epsilon);
    acc += w.lambda2 * sum;
  }
  return acc;
}

double hoitv_value(const Image& img, const RegWeights& w) {
  const int d = img.d();
  double acc = 0.0;
  if (w.lambda1 != 0.0) {
    const FirstOrderField u = apply_first_diff(img);
    double sum = 0.0;
    for (int i = 0; i < d; ++i) sum += std::hypot(u.v[i], u.v[d + i]);
    acc += w.lambda1 * sum;
  }
  if (w.lambda2 != 0.0) {
    const SecondOrderField c = apply_second_diff(img);
    double sum = 0.0;
    for (int i = 0; i < d; ++i)
      sum += std::sqrt(c.v[i] * c.v[i] + c.v[d + i] * c.v[d + i] +
                       c.v[2 * d + i] * c.v[2 * d + i] + c.v[3 * d + i] * c.v[3 * d + i]);
    acc += w.lambda2 * sum;
  }
  return acc;
}

Image shoitv_grad(const Image& img, const RegWeights& w, const SmoothingParams& s) {
  if (s.epsilon <= 0.0) throw std::invalid_argument("shoitv_grad: eps must be positive");
  const int d = img.d();
  Image grad(img.n);
  if (w.lambda1 != 0.0) {
    FirstOrderField u = apply_first_diff(img);
    for (int i = 0; i < d; ++i) {
      const double den = std::max(std::hypot(u.v[i], u.v[d + i]), s.epsilon);
      const double scale = w.lambda1 / den;
      u.v[i] *= scale;
      u.v[d + i] *= scale;
    }
    grad.v += apply_first_diff_adjoint(u).v;
  }
  if (w.lambda2 != 0.0) {
    SecondOrderField c = apply_second_diff(img);
    for (int i = 0; i < d; ++i) {
      const double nrm = std::sqrt(c.v[i] * c.v[i] + c.v[d + i] * c.v[d + i] +
                                   c.v[2 * d + i] * c.v[2 * d + i] + c.v[3 * d + i] * c.v[3 * d + i]);
      const double scale = w.lambda2 / std::max(nrm, s.epsilon);
      c.v[i] *= scale;
      c.v[d + i] *= scale;
      c.v[2 * d + i] *= scale;
      c.v[3 * d + i] *= scale;
    }
    grad.v += apply_second_diff_adjoint(c).v;
  }
  return grad;
}

double fidelity_value(const Image& img, const PoissonData& data) {
  const Vec af = data.op->apply(img.v);
  const Vec q = af + data.background;
  if ((q.array() <= 0.0).any())
    throw std::domain_error("fidelity_value: expected counts must stay positive");
  return af.sum() - data.counts.dot(q.array().log().matrix());
}

Image fidelity_grad(const Image& img, const PoissonData& data) {
  const Vec q = data.op->apply(img.v) + data.background;
  if ((q.array() <= 0.0).any())
    throw std::domain_error("fidelity_grad: expected counts must stay positive");
  const Vec r = Vec::Ones(q.size()) - (data.counts.array() / q.array()).matrix();
  return Image(img.n, data.op->apply_adjoint(r));
}

double objective_value(const Image& img, const PoissonData& data, const RegWeights& w,
                       const SmoothingParams& s) {
  if ((img.v.array() < 0.0).any()) return std::numeric_limits<double>::infinity();
  return fidelity_value(img, data) + shoitv_value(img, w, s);
}

double objective_value_nonsmooth(const Image& img, const PoissonData& data,
                                 const RegWeights& w) {
  if ((img.v.array() < 0.0).any()) return std::numeric_limits<double>::infinity();
  return fidelity_value(img, data) + hoitv_value(img, w);
}

Image objective_grad(const Image& img, const PoissonData& data, const RegWeights& w,
                     const SmoothingParams& s) {
  Image grad = fidelity_grad(img, data);
  grad.v += shoitv_grad(img, w, s).v;
  return grad;
}

FirstOrderField prox_group_l2(const FirstOrderField& field, double threshold) {
  if (threshold < 0.0) throw std::invalid_argument("prox_group_l2: threshold must be >= 0");
  FirstOrderField out = field;
  const int d = field.d();
  for (int i = 0; i < d; ++i) {
    const double nrm = std::hypot(out.v[i], out.v[d + i]);
    const double scale = nrm <= threshold ? 0.0 : 1.0 - threshold / nrm;
    out.v[i] *= scale;
    out.v[d + i] *= scale;
  }
  return out;
}

SecondOrderField prox_group_l2(const SecondOrderField& field, double threshold) {
  if (threshold < 0.0) throw std::invalid_argument("prox_group_l2: threshold must be >= 0");
  SecondOrderField out = field;
  const int d = field.d();
  for (int i = 0; i < d; ++i) {
    const double nrm = std::sqrt(out.v[i] * out.v[i] + out.v[d + i] * out.v[d + i] +
                                 out.v[2 * d + i] * out.v[2 * d + i] +
                                 out.v[3 * d + i] * out.v[3 * d + i]);
    const double scale = nrm <= threshold ? 0.0 : 1.0 - threshold / nrm;
    out.v[i] *= scale;
    out.v[d + i] *= scale;
    out.v[2 * d + i] *= scale;
    out.v[3 * d + i] *= scale;
  }
  return out;
}

Image prox_nonneg(const Image& img) { return Image(img.n, img.v.cwiseMax(0.0)); }

LipschitzBound lipschitz_upper_bound(const PoissonData& data, const RegWeights& w,
                                     const SmoothingParams& s) {
  if (s.epsilon <= 0.0)
    throw std::invalid_argument("lipschitz_upper_bound: eps must be positive");
  const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(data.op->cols()))));
  if ((w.lambda1 != 0.0 || w.lambda2 != 0.0) &&
      static_cast<Eigen::Index>(n) * n != data.op->cols())
    throw std::invalid_argument("lipschitz_upper_bound: image is not square");

  auto require = [](const PowerIterationResult& r, const char* what) {
    if (!r.converged) {
      std::ostringstream msg;
      msg << "lipschitz_upper_bound: power iteration for " << what << " did not converge after "
          << r.iterations << " iterations (partial estimate " << r.norm_sq << ")";
      throw std::runtime_error(msg.str());
    }
    return r.norm_sq;
  };

  LipschitzBound out;
  out.a_norm_sq = require(estimate_op_norm_sq(*data.op), "the system operator");
  const double curvature = (data.counts.array() / data.background.array().square()).maxCoeff();
  out.value = out.a_norm_sq * curvature;
  if (w.lambda1 != 0.0) {
    out.b1_norm_sq = require(estimate_op_norm_sq(FirstDiffOp(n)), "the first difference");
    out.value += (2.0 / s.epsilon) * w.lambda1 * out.b1_norm_sq;
  }
  if (w.lambda2 != 0.0) {
    out.b2_norm_sq = require(estimate_op_norm_sq(SecondDiffOp(n)), "the second difference");
    out.value += (2.0 / s.epsilon) * w.lambda2 * out.b2_norm_sq;
  }
  return out;
}

}  // namespace petrec
