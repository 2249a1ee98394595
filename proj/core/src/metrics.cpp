#include "petrec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace petrec {

namespace {

double largest_radius(const PhantomSpec& spec) {
  double r = 0.0;
  for (double x : spec.radii_px) r = std::max(r, x);
  return r;
}

bool far_from_spheres(double row, double col,
                      const std::vector<std::pair<double, double>>& centers,
                      double min_dist) {
  for (const auto& ctr : centers) {
    const double dr = row - ctr.first, dc = col - ctr.second;
    if (std::sqrt(dr * dr + dc * dc) < min_dist) return false;
  }
  return true;
}

}  // namespace

RoiSpec roi_for_sphere(const PhantomSpec& spec, int n, std::size_t sphere_index) {
  if (sphere_index >= spec.radii_px.size())
    throw std::invalid_argument("roi_for_sphere: sphere index out of range");
  const double radius = spec.radii_px[sphere_index] - 1.0;
  if (radius < 1.0)
    throw std::invalid_argument("roi_for_sphere: sphere too small for a rim-free ROI");

  const auto centers = uniform_sphere_centers(spec, n);
  const double min_dist = 2.0 * largest_radius(spec);
  const double cx = (n - 1) / 2.0;
  const double support = n / 2.0;

  RoiSpec roi;
  roi.hot_row = centers[sphere_index].first;
  roi.hot_col = centers[sphere_index].second;
  roi.hot_radius = radius;
  roi.bg_radius = radius;

  // Deterministic scan: among all integer positions that satisfy the
  // distance rules, take the one closest to the grid center.
  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double dr = r - cx, dc = c - cx;
      const double from_center = std::sqrt(dr * dr + dc * dc);
      if (from_center + radius > support) continue;
      if (!far_from_spheres(r, c, centers, min_dist)) continue;
      if (from_center < best) {
        best = from_center;
        roi.bg_row = r;
        roi.bg_col = c;
        found = true;
      }
    }
  if (!found)
    throw std::invalid_argument("roi_for_sphere: no valid background placement exists");
  return roi;
}

void validate_roi(const RoiSpec& roi, const PhantomSpec& spec, int n) {
  if (roi.hot_radius != roi.bg_radius)
    throw std::invalid_argument("validate_roi: regions must have equal radii");
  if (!(roi.hot_radius > 0.0))
    throw std::invalid_argument("validate_roi: radius must be positive");
  const double cx = (n - 1) / 2.0;
  const double support = n / 2.0;
  auto inside = [&](double row, double col, double radius) {
    const double dr = row - cx, dc = col - cx;
    return std::sqrt(dr * dr + dc * dc) + radius <= support;
  };
  if (!inside(roi.hot_row, roi.hot_col, roi.hot_radius))
    throw std::invalid_argument("validate_roi: hot region leaves the support disk");
  if (!inside(roi.bg_row, roi.bg_col, roi.bg_radius))
    throw std::invalid_argument("validate_roi: background region leaves the support disk");
  const auto centers = uniform_sphere_centers(spec, n);
  if (!far_from_spheres(roi.bg_row, roi.bg_col, centers, 2.0 * largest_radius(spec)))
    throw std::invalid_argument("validate_roi: background region too close to a sphere");
}

double roi_mean(const Image& img, double row, double col, double radius) {
  double sum = 0.0;
  long count = 0;
  for (int r = 0; r < img.n; ++r)
    for (int c = 0; c < img.n; ++c) {
      const double dr = r - row, dc = c - col;
      if (dr * dr + dc * dc <= radius * radius) {
        sum += img.at(r, c);
        ++count;
      }
    }
  if (count == 0) throw std::invalid_argument("roi_mean: region covers no pixels");
  return sum / static_cast<double>(count);
}

double nofv(double phi_k, double phi_0, double phi_ref) {
  if (!(phi_0 > phi_ref))
    throw std::invalid_argument("nofv: initial objective must exceed the reference");
  return (phi_k - phi_ref) / (phi_0 - phi_ref);
}

double psnr(const Image& img, const Image& truth) {
  if (img.n != truth.n) throw std::invalid_argument("psnr: image sizes differ");
  const double max_val = truth.v.maxCoeff();
  if (!(max_val > 0.0))
    throw std::invalid_argument("psnr: truth has no positive pixels");
  const double mse = (img.v - truth.v).squaredNorm() / static_cast<double>(img.d());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(max_val * max_val / mse);
}

double nrc(const Image& img, const Image& truth, const RoiSpec& roi) {
  auto rc = [&](const Image& f) {
    const double hot = roi_mean(f, roi.hot_row, roi.hot_col, roi.hot_radius);
    const double bg = roi_mean(f, roi.bg_row, roi.bg_col, roi.bg_radius);
    if (!(bg > 0.0)) throw std::domain_error("nrc: background mean is not positive");
    return std::abs(hot - bg) / bg;
  };
  const double rc_truth = rc(truth);
  if (rc_truth == 0.0) throw std::domain_error("nrc: truth has no contrast");
  return rc(img) / rc_truth;
}

Vec clp(const Image& img, int row) {
  if (row < 0 || row >= img.n) throw std::invalid_argument("clp: row out of range");
  Vec profile(img.n);
  for (int c = 0; c < img.n; ++c) profile[c] = img.at(row, c);
  return profile;
}

int clp_default_row(int n) {
  return static_cast<int>(std::lround((n - 1) / 2.0));
}

double relative_error(const Image& f_k, const Image& f_prev) {
  if (f_k.n != f_prev.n) throw std::invalid_argument("relative_error: sizes differ");
  const double cn = f_k.v.norm();
  if (cn == 0.0) throw std::domain_error("relative_error: current iterate is zero");
  return (f_k.v - f_prev.v).norm() / cn;
}

}  // namespace petrec
