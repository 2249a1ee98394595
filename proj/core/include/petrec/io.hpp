#pragma once

#include <string>

#include "petrec/projector.hpp"
#include "petrec/types.hpp"

namespace petrec {

// Flat binary image format: 8-byte magic "PETIMG01", two little-endian
// uint32 side lengths, then row-major float64 pixels.
void write_image_raw(const std::string& path, const Image& img);
Image read_image_raw(const std::string& path);

// 8-bit binary portable graymap, scaled so the image maximum maps to 255.
void write_pgm(const std::string& path, const Image& img);

// One CSV row per angle, one column per detector.
void write_sinogram_csv(const std::string& path, const Sinogram& sino, const ScanGeometry& geom);

// Shortest decimal form that round-trips a double (17 significant digits).
std::string format_g17(double v);

}  // namespace petrec
