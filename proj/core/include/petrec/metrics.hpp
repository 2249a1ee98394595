#pragma once

#include <cstddef>

#include "petrec/simulator.hpp"
#include "petrec/types.hpp"

namespace petrec {

// Matched pair of equal-size disk regions: one on a hot feature, one in
// clean background. A pixel belongs to a region when its center lies within
// the radius, the same membership rule the phantoms use.
struct RoiSpec {
  double hot_row = 0.0, hot_col = 0.0;
  double hot_radius = 0.0;
  double bg_row = 0.0, bg_col = 0.0;
  double bg_radius = 0.0;
};

// Hot ROI is the sphere disk shrunk by one pixel to stay clear of the
// partial-volume rim; the background ROI has the same radius and sits at
// least twice the largest sphere radius away from every sphere center while
// staying inside the support disk (closest such spot to the grid center).
// Throws when the sphere is too small to shrink or no placement exists.
RoiSpec roi_for_sphere(const PhantomSpec& spec, int n, std::size_t sphere_index);

// Enforces the RoiSpec invariants against a phantom layout: equal radii,
// both disks inside the support, background far enough from every sphere.
void validate_roi(const RoiSpec& roi, const PhantomSpec& spec, int n);

// Mean over the disk; throws when the disk covers no pixel centers.
double roi_mean(const Image& img, double row, double col, double radius);

// (phi_k - phi_ref) / (phi_0 - phi_ref): 1 at the start, 0 at the reference.
double nofv(double phi_k, double phi_0, double phi_ref);

// 10 log10(MAX^2 / MSE) with MAX the truth maximum and MSE the mean squared
// pixel difference. Equal images give +infinity.
double psnr(const Image& img, const Image& truth);

// Relative contrast |mean_hot - mean_bg| / mean_bg of img, normalized by the
// same quantity of the truth.
double nrc(const Image& img, const Image& truth, const RoiSpec& roi);

// One image row as a profile.
Vec clp(const Image& img, int row);
// The row through the sphere-center ring of the uniform phantom, which
// crosses two spheres on opposite sides of the grid.
int clp_default_row(int n);

// ||f_k - f_prev|| / ||f_k||.
double relative_error(const Image& f_k, const Image& f_prev);

}  // namespace petrec
