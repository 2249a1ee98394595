#include "petrec/simulator.hpp"

#include <cmath>
#include <stdexcept>

#include "petrec/io.hpp"
#include "petrec/rng.hpp"

namespace petrec {

void NoiseProtocol::validate() const {
  if (!(total_counts > 0.0)) throw std::invalid_argument("NoiseProtocol: total counts must be positive");
  if (scatter_fraction < 0.0 || scatter_fraction >= 1.0)
    throw std::invalid_argument("NoiseProtocol: scatter fraction must be in [0,1)");
  if (random_fraction < 0.0 || random_fraction >= 1.0)
    throw std::invalid_argument("NoiseProtocol: random fraction must be in [0,1)");
}

PhantomSpec PhantomSpec::desk_spheres() {
  PhantomSpec spec;
  spec.radii_px = {2.0, 3.0, 4.0, 5.0, 6.0, 7.0};
  return spec;
}

Image fov_disk(int n) {
  Image disk(n);
  const double cx = (n - 1) / 2.0;
  const double radius = n / 2.0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double dy = r - cx, dx = c - cx;
      if (dx * dx + dy * dy <= radius * radius) disk.at(r, c) = 1.0;
    }
  return disk;
}

std::vector<std::pair<double, double>> uniform_sphere_centers(const PhantomSpec& spec, int n) {
  const std::size_t count = spec.radii_px.size();
  const double ring = spec.ring_radius_frac * n;
  const double cx = (n - 1) / 2.0;
  std::vector<std::pair<double, double>> centers(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double ang = 2.0 * 3.14159265358979323846 * j / count;
    centers[j] = {cx - ring * std::sin(ang), cx + ring * std::cos(ang)};
  }
  return centers;
}

Image make_uniform_phantom(const PhantomSpec& spec, int n) {
  if (spec.activity_ratio <= 0.0)
    throw std::invalid_argument("make_uniform_phantom: activity ratio must be positive");
  if (spec.background < 0.0)
    throw std::invalid_argument("make_uniform_phantom: background must be >= 0");
  const std::size_t count = spec.radii_px.size();
  const double ring = spec.ring_radius_frac * n;
  const double support_radius = n / 2.0;

  const auto centers = uniform_sphere_centers(spec, n);
  for (std::size_t j = 0; j < count; ++j) {
    if (spec.radii_px[j] <= 0.0)
      throw std::invalid_argument("make_uniform_phantom: sphere radii must be positive");
    if (ring + spec.radii_px[j] > support_radius)
      throw std::invalid_argument("make_uniform_phantom: sphere leaves the support disk");
  }
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = i + 1; j < count; ++j) {
      const double dr = centers[i].first - centers[j].first;
      const double dc = centers[i].second - centers[j].second;
      if (std::sqrt(dr * dr + dc * dc) < spec.radii_px[i] + spec.radii_px[j])
        throw std::invalid_argument("make_uniform_phantom: spheres overlap");
    }

  Image img = fov_disk(n);
  img.v *= spec.background;
  const double hot = spec.background * spec.activity_ratio;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      for (std::size_t j = 0; j < count; ++j) {
        const double dr = r - centers[j].first, dc = c - centers[j].second;
        if (dr * dr + dc * dc <= spec.radii_px[j] * spec.radii_px[j]) {
          img.at(r, c) = hot;
          break;
        }
      }
  return img;
}

Image make_head_phantom(int n) {
  // All shapes are expressed in coordinates normalized to the support disk.
  Image img(n);
  const double cx = (n - 1) / 2.0;
  const double scale = n / 2.0;
  auto inside_ellipse = [](double x, double y, double ex, double ey, double ax, double ay,
                           double rot) {
    const double cr = std::cos(rot), sr = std::sin(rot);
    const double u = ((x - ex) * cr + (y - ey) * sr) / ax;
    const double v = (-(x - ex) * sr + (y - ey) * cr) / ay;
    return u * u + v * v <= 1.0;
  };
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double x = (c - cx) / scale;
      const double y = (cx - r) / scale;
      double val = 0.0;
      if (inside_ellipse(x, y, 0, 0, 0.86, 0.94, 0)) val = 2.0;           // rim
      if (inside_ellipse(x, y, 0, 0, 0.78, 0.86, 0)) val = 1.0;           // interior
      if (inside_ellipse(x, y, -0.26, 0.10, 0.28, 0.52, 0.25)) val = 3.0; // left lobe
      if (inside_ellipse(x, y, 0.26, 0.10, 0.28, 0.52, -0.25)) val = 3.0; // right lobe
      if (inside_ellipse(x, y, 0.0, -0.42, 0.18, 0.22, 0)) val = 4.0;     // lower insert
      if (inside_ellipse(x, y, 0.0, 0.38, 0.10, 0.10, 0)) val = 0.5;      // cold spot
      img.at(r, c) = val;
    }
  return img;
}

Image make_phantom(const PhantomSpec& spec, int n) {
  switch (spec.variant) {
    case PhantomSpec::Variant::uniform_spheres:
      return make_uniform_phantom(spec, n);
    case PhantomSpec::Variant::synthetic_head:
      return make_head_phantom(n);
    case PhantomSpec::Variant::external_image: {
      Image img = read_image_raw(spec.image_path);
      if (img.n != n)
        throw std::invalid_argument("make_phantom: external image side does not match grid");
      return img;
    }
  }
  throw std::invalid_argument("make_phantom: unknown variant");
}

Image gaussian_blur(const Image& img, double fwhm_mm, const ScanGeometry& geom) {
  if (fwhm_mm < 0.0) throw std::invalid_argument("gaussian_blur: fwhm must be >= 0");
  if (fwhm_mm == 0.0) return img;
  const double sigma = fwhm_mm / geom.pixel_mm() / std::sqrt(8.0 * std::log(2.0));
  const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
  Vec kernel(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i) kernel[i + radius] = std::exp(-i * i / (2.0 * sigma * sigma));
  kernel /= kernel.sum();

  const int n = img.n;
  Image tmp(n), out(n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int cc = c + i;
        if (cc >= 0 && cc < n) acc += kernel[i + radius] * img.at(r, cc);
      }
      tmp.at(r, c) = acc;
    }
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int rr = r + i;
        if (rr >= 0 && rr < n) acc += kernel[i + radius] * tmp.at(rr, c);
      }
      out.at(r, c) = acc;
    }
  return out;
}

AcquisitionResult simulate_acquisition(const Image& phantom, const ScanGeometry& geom,
                                       const NoiseProtocol& noise, double fwhm_mm,
                                       double mu_per_cm) {
  noise.validate();
  geom.validate();
  if (phantom.n != geom.image_side)
    throw std::invalid_argument("simulate_acquisition: phantom side does not match geometry");
  if ((phantom.v.array() < 0.0).any())
    throw std::invalid_argument("simulate_acquisition: phantom must be nonnegative");

  auto system = system_matrix_for(geom);
  const Image blurred = gaussian_blur(phantom, fwhm_mm, geom);
  const Sinogram att = attenuation_factors(fov_disk(geom.image_side), mu_per_cm, geom);
  const Sinogram trues_shape = (att.array() * system->apply(blurred.v).array()).matrix();
  const double trues_total = trues_shape.sum();
  if (trues_total <= 0.0)
    throw std::invalid_argument("simulate_acquisition: phantom projects to zero counts");

  const double SF = noise.scatter_fraction, RF = noise.random_fraction;
  const double TC = noise.total_counts;
  const double Tc = TC * (1.0 - SF) * (1.0 - RF);
  const double Sc = TC * SF * (1.0 - RF);
  const double Rc = TC * RF;
  const double count_scale = Tc / trues_total;
  const Eigen::Index m = geom.bins();

  Sinogram gamma = Sinogram::Zero(m);
  if (Sc > 0.0) {
    // Scatter: a heavily smoothed copy of the object, projected and scaled.
    const Image smooth = gaussian_blur(blurred, 8.0 * std::max(fwhm_mm, geom.pixel_mm()), geom);
    Sinogram scatter = system->apply(smooth.v);
    const double total = scatter.sum();
    if (total > 0.0) gamma += (Sc / total) * scatter;
  }
  if (Rc > 0.0) gamma.array() += Rc / static_cast<double>(m);
  if ((gamma.array() <= 0.0).any()) {
    // No background components requested: keep the model well defined with a
    // vanishingly small floor.
    gamma = gamma.cwiseMax(1e-12 * TC / static_cast<double>(m));
  }

  const Sinogram mean = count_scale * trues_shape + gamma;
  Sinogram g(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    CounterRng rng(noise.seed, static_cast<std::uint64_t>(i));
    g[i] = static_cast<double>(poisson_sample(mean[i], rng));
  }

  AcquisitionResult out;
  out.g = std::move(g);
  out.gamma = std::move(gamma);
  out.attenuation = att;
  // Images are kept in count-scaled units: the truth image maps to the mean
  // trues under the returned operator, and the flat initial image comes out
  // at the same level.
  out.system = std::make_shared<AttenuatedOperator>(system, att);
  out.truth = Image(blurred.n, count_scale * blurred.v);
  out.count_scale = count_scale;
  out.Tc = Tc;
  out.Sc = Sc;
  out.Rc = Rc;
  return out;
}

Image initial_image(const Sinogram& g, const Sinogram& gamma, const Sinogram& attenuation,
                    const ScanGeometry& geom) {
  if (g.size() != geom.bins() || gamma.size() != g.size() || attenuation.size() != g.size())
    throw std::invalid_argument("initial_image: sinogram sizes do not match geometry");
  double corrected = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i)
    corrected += std::max(g[i] - gamma[i], 0.0) / attenuation[i];
  const Image disk = fov_disk(geom.image_side);
  const double pixels_in_fov = disk.v.sum();
  const double value = corrected / (pixels_in_fov * geom.n_angles);
  return Image(geom.image_side, value * disk.v);
}

}  // namespace petrec
