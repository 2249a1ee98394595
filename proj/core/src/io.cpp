#include "petrec/io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

namespace petrec {

namespace {
constexpr char kMagic[8] = {'P', 'E', 'T', 'I', 'M', 'G', '0', '1'};
}

void write_image_raw(const std::string& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_image_raw: cannot open " + path);
  const std::uint32_t n = static_cast<std::uint32_t>(img.n);
  out.write(kMagic, sizeof(kMagic));
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(img.v.data()),
            static_cast<std::streamsize>(sizeof(double)) * img.v.size());
  if (!out) throw std::runtime_error("write_image_raw: short write to " + path);
}

Image read_image_raw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_image_raw: cannot open " + path);
  char magic[8];
  std::uint32_t rows = 0, cols = 0;
  in.read(magic, sizeof(magic));
  in.read(reinterpret_cast<char*>(&rows), 4);
  in.read(reinterpret_cast<char*>(&cols), 4);
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("read_image_raw: bad header in " + path);
  if (rows != cols || rows == 0 || rows > 1u << 15)
    throw std::runtime_error("read_image_raw: unsupported image size in " + path);
  Image img(static_cast<int>(rows));
  in.read(reinterpret_cast<char*>(img.v.data()),
          static_cast<std::streamsize>(sizeof(double)) * img.v.size());
  if (!in) throw std::runtime_error("read_image_raw: truncated pixel data in " + path);
  return img;
}

void write_pgm(const std::string& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_pgm: cannot open " + path);
  const double maxv = std::max(img.v.maxCoeff(), 0.0);
  out << "P5\n" << img.n << " " << img.n << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(img.n));
  for (int r = 0; r < img.n; ++r) {
    for (int c = 0; c < img.n; ++c) {
      const double v = maxv > 0.0 ? img.at(r, c) / maxv : 0.0;
      row[static_cast<std::size_t>(c)] =
          static_cast<unsigned char>(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5);
    }
    out.write(reinterpret_cast<const char*>(row.data()), img.n);
  }
  if (!out) throw std::runtime_error("write_pgm: short write to " + path);
}

void write_sinogram_csv(const std::string& path, const Sinogram& sino, const ScanGeometry& geom) {
  if (sino.size() != geom.bins())
    throw std::invalid_argument("write_sinogram_csv: sinogram does not match geometry");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_sinogram_csv: cannot open " + path);
  for (int a = 0; a < geom.n_angles; ++a) {
    for (int i = 0; i < geom.n_detectors; ++i) {
      if (i) out << ',';
      out << format_g17(sino[static_cast<Eigen::Index>(a) * geom.n_detectors + i]);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_sinogram_csv: short write to " + path);
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace petrec
