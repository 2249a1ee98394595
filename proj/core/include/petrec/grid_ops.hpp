#pragma once

#include "petrec/types.hpp"

namespace petrec {

// Backward-difference operators on a square image, matrix free.
//
// Let D be the n-by-n backward difference with a zero first row:
// (Dx)_0 = 0 and (Dx)_i = x_i - x_{i-1} for i >= 1. With row-major
// vectorization, A (x) B acts as A across rows and B within rows, so
//
//   first difference  = [ I (x) D ; D (x) I ]              (2d x d)
//   second difference = [ I (x) (-D^T D) ; (-D^T) (x) D ;
//                         (-D^T D) (x) I ; D (x) (-D^T) ]  (4d x d)
//
// Blocks of FirstOrderField: 0 = horizontal diff, 1 = vertical diff.
// Blocks of SecondOrderField follow the order above.

FirstOrderField apply_first_diff(const Image& f);
Image apply_first_diff_adjoint(const FirstOrderField& u);

SecondOrderField apply_second_diff(const Image& f);
Image apply_second_diff_adjoint(const SecondOrderField& c);

// Spectral norm bounds ||B1||^2 <= 8 and ||B2||^2 <= 64, used to pick
// smoothing-free step parameters without a power iteration.
inline constexpr double kFirstDiffOpNormSq = 8.0;
inline constexpr double kSecondDiffOpNormSq = 64.0;

// LinearMap adapters over the stencils, for power iteration and the
// primal-dual solver which treats the difference operators as plain maps.
class FirstDiffOp final : public LinearMap {
 public:
  explicit FirstDiffOp(int n) : n_(n) {
    if (n <= 0) throw std::invalid_argument("FirstDiffOp: side must be positive");
  }
  Eigen::Index rows() const override { return 2LL * n_ * n_; }
  Eigen::Index cols() const override { return static_cast<Eigen::Index>(n_) * n_; }
  Vec apply(const Vec& x) const override;
  Vec apply_adjoint(const Vec& y) const override;

 private:
  int n_;
};

class SecondDiffOp final : public LinearMap {
 public:
  explicit SecondDiffOp(int n) : n_(n) {
    if (n <= 0) throw std::invalid_argument("SecondDiffOp: side must be positive");
  }
  Eigen::Index rows() const override { return 4LL * n_ * n_; }
  Eigen::Index cols() const override { return static_cast<Eigen::Index>(n_) * n_; }
  Vec apply(const Vec& x) const override;
  Vec apply_adjoint(const Vec& y) const override;

 private:
  int n_;
};

}  // namespace petrec
