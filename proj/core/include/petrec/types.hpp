#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace petrec {

using Vec = Eigen::VectorXd;

// Thrown when an iteration produces NaN/Inf and cannot continue.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Matrix-free linear operator. Implementations must make apply_adjoint the
// exact adjoint of apply (up to floating-point roundoff).
class LinearMap {
 public:
  virtual ~LinearMap() = default;
  virtual Eigen::Index rows() const = 0;
  virtual Eigen::Index cols() const = 0;
  virtual Vec apply(const Vec& x) const = 0;
  virtual Vec apply_adjoint(const Vec& y) const = 0;
};

// Square n-by-n image stored row major: pixel (r, c) lives at index r*n + c.
struct Image {
  int n = 0;
  Vec v;

  Image() = default;
  explicit Image(int side) : n(side), v(Vec::Zero(static_cast<Eigen::Index>(side) * side)) {
    if (side <= 0) throw std::invalid_argument("Image: side must be positive");
  }
  Image(int side, Vec data) : n(side), v(std::move(data)) {
    if (side <= 0) throw std::invalid_argument("Image: side must be positive");
    if (v.size() != static_cast<Eigen::Index>(side) * side)
      throw std::invalid_argument("Image: data size does not match side*side");
  }

  int d() const { return n * n; }
  double& at(int r, int c) { return v[static_cast<Eigen::Index>(r) * n + c]; }
  double at(int r, int c) const { return v[static_cast<Eigen::Index>(r) * n + c]; }
};

// Stacked first differences of an n-by-n image: block 0 holds the horizontal
// (within row) differences, block 1 the vertical ones. Size 2*d.
struct FirstOrderField {
  int n = 0;
  Vec v;

  FirstOrderField() = default;
  explicit FirstOrderField(int side)
      : n(side), v(Vec::Zero(2 * static_cast<Eigen::Index>(side) * side)) {
    if (side <= 0) throw std::invalid_argument("FirstOrderField: side must be positive");
  }
  FirstOrderField(int side, Vec data) : n(side), v(std::move(data)) {
    if (side <= 0) throw std::invalid_argument("FirstOrderField: side must be positive");
    if (v.size() != 2 * static_cast<Eigen::Index>(side) * side)
      throw std::invalid_argument("FirstOrderField: data size does not match 2*side*side");
  }

  int d() const { return n * n; }
  auto block(int which) { return v.segment(static_cast<Eigen::Index>(which) * d(), d()); }
  auto block(int which) const { return v.segment(static_cast<Eigen::Index>(which) * d(), d()); }
};

// Stacked second differences, four blocks of length d (see grid_ops.hpp for
// the block meanings). Size 4*d.
struct SecondOrderField {
  int n = 0;
  Vec v;

  SecondOrderField() = default;
  explicit SecondOrderField(int side)
      : n(side), v(Vec::Zero(4 * static_cast<Eigen::Index>(side) * side)) {
    if (side <= 0) throw std::invalid_argument("SecondOrderField: side must be positive");
  }
  SecondOrderField(int side, Vec data) : n(side), v(std::move(data)) {
    if (side <= 0) throw std::invalid_argument("SecondOrderField: side must be positive");
    if (v.size() != 4 * static_cast<Eigen::Index>(side) * side)
      throw std::invalid_argument("SecondOrderField: data size does not match 4*side*side");
  }

  int d() const { return n * n; }
  auto block(int which) { return v.segment(static_cast<Eigen::Index>(which) * d(), d()); }
  auto block(int which) const { return v.segment(static_cast<Eigen::Index>(which) * d(), d()); }
};

}  // namespace petrec
