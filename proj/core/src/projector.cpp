#include "petrec/projector.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>
#include <vector>

namespace petrec {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

ScanGeometry ScanGeometry::full_scale() { return {576, 4.0, 288, 300.0, 256}; }

ScanGeometry ScanGeometry::desk_scale() { return {96, 300.0 / 96.0, 90, 300.0, 64}; }

ScanGeometry ScanGeometry::scaled_to(int side) {
  if (side <= 0) throw std::invalid_argument("ScanGeometry: side must be positive");
  const ScanGeometry desk = desk_scale();
  const int det = std::max(8, (desk.n_detectors * side + desk.image_side / 2) / desk.image_side);
  const int ang = std::max(8, (desk.n_angles * side + desk.image_side / 2) / desk.image_side);
  return {det, desk.fov_mm / det, ang, desk.fov_mm, side};
}

void ScanGeometry::validate() const {
  if (n_detectors <= 0 || n_angles <= 0 || image_side <= 0)
    throw std::invalid_argument("ScanGeometry: counts must be positive");
  if (detector_width_mm <= 0.0 || fov_mm <= 0.0)
    throw std::invalid_argument("ScanGeometry: lengths must be positive");
}

namespace {

// Normalized footprint CDF: fraction of the pixel's area on lines with
// offset <= s, relative to the pixel center. The footprint of a square
// pixel under a parallel projection at angle theta is the convolution of two
// boxes of widths p|cos t| and p|sin t|, i.e. a trapezoid with ramp width
// wmin and flat top from -T to T where T = (wmax - wmin)/2, W = (wmax+wmin)/2.
struct Footprint {
  double wmax, wmin, half_support;  // half_support = (wmax + wmin) / 2

  double cdf(double s) const {
    const double W = half_support;
    if (s <= -W) return 0.0;
    if (s >= W) return 1.0;
    if (wmin < 1e-12 * wmax) {
      // axis-aligned: plain box of width wmax
      return (s + W) / wmax;
    }
    const double T = (wmax - wmin) / 2.0;
    if (s < -T) {
      const double r = s + W;
      return r * r / (2.0 * wmax * wmin);
    }
    if (s <= T) return (wmin / 2.0 + (s + T)) / wmax;
    const double r = W - s;
    return 1.0 - r * r / (2.0 * wmax * wmin);
  }
};

int env_thread_count() {
  if (const char* env = std::getenv("PETREC_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && v <= 256) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

}  // namespace

SystemMatrix::SystemMatrix(const ScanGeometry& geom) : geom_(geom) {
  geom.validate();
  const int n = geom.image_side;
  const double p = geom.pixel_mm();
  const double det_w = geom.detector_width_mm;
  const double array_half = geom.n_detectors * det_w / 2.0;
  if (array_half < geom.fov_mm / 2.0 - 1e-9)
    throw std::invalid_argument("SystemMatrix: detector array does not cover the field of view");

  using Triplet = Eigen::Triplet<double>;
  std::vector<std::vector<Triplet>> per_angle(geom.n_angles);

  auto build_angle = [&](int a) {
    const double theta = kPi * a / geom.n_angles;
    const double ct = std::cos(theta), st = std::sin(theta);
    const double w1 = p * std::abs(ct), w2 = p * std::abs(st);
    const Footprint fp{std::max(w1, w2), std::min(w1, w2), (w1 + w2) / 2.0};
    auto& trips = per_angle[a];
    trips.reserve(static_cast<std::size_t>(n) * n * 3);
    for (int r = 0; r < n; ++r) {
      const double y = ((n - 1) / 2.0 - r) * p;
      for (int c = 0; c < n; ++c) {
        const double x = (c - (n - 1) / 2.0) * p;
        const double s_c = x * ct + y * st;
        const int lo = std::max(
            0, static_cast<int>(std::floor((s_c - fp.half_support + array_half) / det_w)));
        const int hi = std::min(
            geom.n_detectors - 1,
            static_cast<int>(std::floor((s_c + fp.half_support + array_half) / det_w)));
        for (int i = lo; i <= hi; ++i) {
          const double s0 = i * det_w - array_half;
          const double wgt = fp.cdf(s0 + det_w - s_c) - fp.cdf(s0 - s_c);
          if (wgt > 1e-14)
            trips.emplace_back(a * geom.n_detectors + i, r * n + c, wgt);
        }
      }
    }
  };

  const int threads = std::min(env_thread_count(), geom.n_angles);
  if (threads <= 1) {
    for (int a = 0; a < geom.n_angles; ++a) build_angle(a);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (int a = next.fetch_add(1); a < geom.n_angles; a = next.fetch_add(1)) build_angle(a);
      });
    for (auto& th : pool) th.join();
  }

  std::vector<Triplet> all;
  std::size_t total = 0;
  for (const auto& v : per_angle) total += v.size();
  all.reserve(total);
  for (const auto& v : per_angle) all.insert(all.end(), v.begin(), v.end());

  matrix_.resize(geom.bins(), static_cast<Eigen::Index>(n) * n);
  matrix_.setFromTriplets(all.begin(), all.end());
  matrix_.makeCompressed();
}

Vec SystemMatrix::apply(const Vec& x) const {
  if (x.size() != cols()) throw std::invalid_argument("SystemMatrix: image size mismatch");
  return matrix_ * x;
}

Vec SystemMatrix::apply_adjoint(const Vec& y) const {
  if (y.size() != rows()) throw std::invalid_argument("SystemMatrix: sinogram size mismatch");
  return matrix_.transpose() * y;
}

std::shared_ptr<const SystemMatrix> system_matrix_for(const ScanGeometry& geom) {
  struct Key {
    int det, ang, side;
    double width, fov;
    bool operator<(const Key& o) const {
      return std::tie(det, ang, side, width, fov) < std::tie(o.det, o.ang, o.side, o.width, o.fov);
    }
  };
  static std::mutex mu;
  static std::map<Key, std::shared_ptr<const SystemMatrix>> cache;

  const Key key{geom.n_detectors, geom.n_angles, geom.image_side, geom.detector_width_mm,
                geom.fov_mm};
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto built = std::make_shared<const SystemMatrix>(geom);
  cache.emplace(key, built);
  return built;
}

Sinogram forward_project(const Image& img, const ScanGeometry& geom) {
  return system_matrix_for(geom)->apply(img.v);
}

Image back_project(const Sinogram& sino, const ScanGeometry& geom) {
  return Image(geom.image_side, system_matrix_for(geom)->apply_adjoint(sino));
}

Sinogram attenuation_factors(const Image& support, double mu_per_cm, const ScanGeometry& geom) {
  if (mu_per_cm < 0.0) throw std::invalid_argument("attenuation_factors: mu must be >= 0");
  if (mu_per_cm == 0.0) return Sinogram::Ones(geom.bins());
  // The projection of the support counts covered pixel areas per unit pixel
  // area; times p^2 it is the strip/support overlap area, and dividing by
  // the strip width recovers the chord length in mm.
  const Sinogram overlap = forward_project(support, geom);
  const double p = geom.pixel_mm();
  const double mm_per_unit = p * p / geom.detector_width_mm;
  return (-mu_per_cm * (mm_per_unit / 10.0) * overlap.array()).exp().matrix();
}

AttenuatedOperator::AttenuatedOperator(std::shared_ptr<const SystemMatrix> system,
                                       Sinogram attenuation, double scale)
    : system_(std::move(system)), att_(std::move(attenuation)), scale_(scale) {
  if (!system_) throw std::invalid_argument("AttenuatedOperator: null system matrix");
  if (att_.size() != system_->rows())
    throw std::invalid_argument("AttenuatedOperator: attenuation size mismatch");
  if (scale_ <= 0.0) throw std::invalid_argument("AttenuatedOperator: scale must be positive");
}

Vec AttenuatedOperator::apply(const Vec& x) const {
  return scale_ * (att_.array() * system_->apply(x).array()).matrix();
}

Vec AttenuatedOperator::apply_adjoint(const Vec& y) const {
  return system_->apply_adjoint((scale_ * att_.array() * y.array()).matrix());
}

}  // namespace petrec
