#pragma once

#include <Eigen/SparseCore>
#include <memory>

#include "petrec/types.hpp"

namespace petrec {

using Sinogram = Vec;  // angle-major: bin index = angle * n_detectors + detector

// Parallel-beam scan description. Angles are uniform over 180 degrees; the
// detector array is centered on the rotation axis. Pixel size is fov/n.
struct ScanGeometry {
  int n_detectors = 0;
  double detector_width_mm = 0.0;
  int n_angles = 0;
  double fov_mm = 0.0;
  int image_side = 0;

  // 576 detectors of 4 mm, 288 angles, 300 mm FOV, 256x256 image.
  static ScanGeometry full_scale();
  // Same FOV at 64x64 with 96 detectors and 90 angles; single runs finish in
  // seconds. Detector width spans the FOV exactly as in the full setup.
  static ScanGeometry desk_scale();
  // Proportional shrink of the desk setup to an arbitrary side length.
  static ScanGeometry scaled_to(int side);

  double pixel_mm() const { return fov_mm / image_side; }
  Eigen::Index bins() const { return static_cast<Eigen::Index>(n_angles) * n_detectors; }
  void validate() const;

  bool operator==(const ScanGeometry&) const = default;
};

// Strip-area projection matrix: entry (i, j) is the area of pixel j covered
// by detector strip i divided by the pixel area. Stored sparse; apply and
// apply_adjoint are exact adjoints of each other by construction.
class SystemMatrix final : public LinearMap {
 public:
  explicit SystemMatrix(const ScanGeometry& geom);

  Eigen::Index rows() const override { return matrix_.rows(); }
  Eigen::Index cols() const override { return matrix_.cols(); }
  Vec apply(const Vec& x) const override;
  Vec apply_adjoint(const Vec& y) const override;

  const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }
  const ScanGeometry& geometry() const { return geom_; }

 private:
  ScanGeometry geom_;
  Eigen::SparseMatrix<double> matrix_;
};

// Process-wide cache so repeated projections against the same geometry reuse
// one matrix. Thread safe.
std::shared_ptr<const SystemMatrix> system_matrix_for(const ScanGeometry& geom);

Sinogram forward_project(const Image& img, const ScanGeometry& geom);
Image back_project(const Sinogram& sino, const ScanGeometry& geom);

// Per-bin survival factors exp(-mu * chord length) where the chord length
// (in cm) of each strip through the support image is taken from the
// projection of the support.
Sinogram attenuation_factors(const Image& support, double mu_per_cm, const ScanGeometry& geom);

// Expected-counts operator for reconstruction: x -> scale * att .* (A x).
class AttenuatedOperator final : public LinearMap {
 public:
  AttenuatedOperator(std::shared_ptr<const SystemMatrix> system, Sinogram attenuation,
                     double scale = 1.0);

  Eigen::Index rows() const override { return system_->rows(); }
  Eigen::Index cols() const override { return system_->cols(); }
  Vec apply(const Vec& x) const override;
  Vec apply_adjoint(const Vec& y) const override;

 private:
  std::shared_ptr<const SystemMatrix> system_;
  Sinogram att_;
  double scale_;
};

}  // namespace petrec
