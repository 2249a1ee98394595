#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "petrec/projector.hpp"
#include "petrec/types.hpp"

namespace petrec {

// Count budget and background composition. The two fractions follow the
// conventions SF = Sc/(Tc+Sc) and RF = Rc/(Tc+Sc+Rc), so at mean level
// Tc = TC(1-SF)(1-RF), Sc = TC*SF*(1-RF), Rc = TC*RF.
struct NoiseProtocol {
  double total_counts = 0.0;
  double scatter_fraction = 0.0;
  double random_fraction = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PhantomSpec {
  enum class Variant { uniform_spheres, synthetic_head, external_image };
  Variant variant = Variant::uniform_spheres;

  // uniform_spheres: hot disks on a ring around the center of a unit
  // background disk. Radii are in pixels at the target grid size.
  std::vector<double> radii_px = {4.0, 6.0, 8.0, 10.0, 12.0, 14.0};
  double activity_ratio = 4.0;
  double background = 1.0;
  double ring_radius_frac = 0.30;  // sphere-center ring radius as fraction of n

  std::string image_path;  // external_image: raw grid file to load

  // Desk-size counterpart of the default sphere set.
  static PhantomSpec desk_spheres();
};

// Sphere centers of the uniform phantom at grid size n as (row, col) pairs in
// radii_px order, spaced evenly on the center ring. Shared with the ROI
// helpers so contrast measurements land exactly on the phantom features.
std::vector<std::pair<double, double>> uniform_sphere_centers(const PhantomSpec& spec, int n);

Image make_uniform_phantom(const PhantomSpec& spec, int n);
// Piecewise-smooth head-like test image: elliptical rim, two lobes and a few
// small inserts. Stand-in for clinical data that cannot ship with the code.
Image make_head_phantom(int n);
// Dispatch over spec.variant (loads spec.image_path for external images).
Image make_phantom(const PhantomSpec& spec, int n);

// Separable Gaussian convolution with zero padding; sigma in pixels is
// fwhm_mm / pixel_mm / sqrt(8 ln 2). fwhm_mm = 0 returns the input.
Image gaussian_blur(const Image& img, double fwhm_mm, const ScanGeometry& geom);

// Everything a reconstruction needs from one simulated scan.
struct AcquisitionResult {
  Sinogram g;            // Poisson sample
  Sinogram gamma;        // known background mean (scatter + randoms)
  Sinogram attenuation;  // per-bin survival factors
  std::shared_ptr<const LinearMap> system;  // attenuated projector; maps truth
                                            // to the mean trues
  Image truth;           // blurred, count-scaled phantom the data was generated from
  double count_scale = 1.0;
  double Tc = 0.0, Sc = 0.0, Rc = 0.0;  // mean-level component totals
};

// Simulation pipeline: blur the phantom, project, attenuate, add a smooth
// scatter background (Gaussian at 8x the PSF width) and uniform randoms,
// scale everything so the mean total equals the count budget, then draw one
// Poisson realization per bin with a counter-based generator.
AcquisitionResult simulate_acquisition(const Image& phantom, const ScanGeometry& geom,
                                       const NoiseProtocol& noise, double fwhm_mm,
                                       double mu_per_cm);

// Uniform disk at the mean attenuation-corrected counts per pixel per angle:
// value = sum_i(max(g_i - gamma_i, 0)/att_i) / (pixels in FOV disk * angles).
Image initial_image(const Sinogram& g, const Sinogram& gamma, const Sinogram& attenuation,
                    const ScanGeometry& geom);

// Pixel-center membership test for the FOV support disk.
Image fov_disk(int n);

}  // namespace petrec
