#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

#include "petrec/io.hpp"
#include "petrec/trace.hpp"
#include "petrec/types.hpp"

using namespace petrec;

namespace {

std::string temp_path(const char* stem) {
  return std::string("/tmp/petrec_io_test_") + stem;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("raw image files round-trip bit for bit") {
  Image img(7);
  for (int i = 0; i < img.d(); ++i) img.v[i] = std::sin(0.7 * i) * 1e3 + 1.0 / 3.0;
  img.v[5] = 0.1 + 0.2;  // a value with no short decimal form

  const std::string path = temp_path("roundtrip.raw");
  write_image_raw(path, img);
  const Image back = read_image_raw(path);
  REQUIRE(back.n == img.n);
  CHECK((back.v - img.v).norm() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("raw image reader rejects corrupt files") {
  const std::string path = temp_path("corrupt.raw");
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOTANIMG" << std::string(16, '\0');
  }
  CHECK_THROWS_AS(read_image_raw(path), std::runtime_error);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_image_raw(temp_path("missing.raw")), std::runtime_error);

  SUBCASE("truncated pixel payload") {
    Image img(4);
    img.v.setConstant(2.0);
    const std::string p2 = temp_path("short.raw");
    write_image_raw(p2, img);
    const std::string full = slurp(p2);
    {
      std::ofstream out(p2, std::ios::binary);
      out.write(full.data(), static_cast<long>(full.size() - 8));
    }
    CHECK_THROWS_AS(read_image_raw(p2), std::runtime_error);
    std::remove(p2.c_str());
  }
}

TEST_CASE("pgm output is a valid 8-bit graymap scaled to the maximum") {
  Image img(2);
  img.v << 0.0, 1.0, 2.0, 4.0;
  const std::string path = temp_path("gray.pgm");
  write_pgm(path, img);
  const std::string bytes = slurp(path);

  const std::string header = "P5\n2 2\n255\n";
  REQUIRE(bytes.size() == header.size() + 4);
  CHECK(bytes.compare(0, header.size(), header) == 0);
  const unsigned char* px =
      reinterpret_cast<const unsigned char*>(bytes.data() + header.size());
  CHECK(px[0] == 0);
  CHECK(px[1] == 64);   // 1/4 of max, rounded
  CHECK(px[2] == 128);
  CHECK(px[3] == 255);
  std::remove(path.c_str());
}

TEST_CASE("sinogram CSV has one row per angle") {
  const ScanGeometry geom = ScanGeometry::scaled_to(8);
  Sinogram sino(geom.bins());
  for (int i = 0; i < sino.size(); ++i) sino[i] = i;
  const std::string path = temp_path("sino.csv");
  write_sinogram_csv(path, sino, geom);

  std::ifstream in(path);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    int commas = 0;
    for (char ch : line)
      if (ch == ',') ++commas;
    CHECK(commas == geom.n_detectors - 1);
  }
  CHECK(rows == geom.n_angles);
  std::remove(path.c_str());
}

TEST_CASE("format_g17 round-trips doubles through text") {
  const double values[] = {0.0,        1.0 / 3.0, 0.1 + 0.2, -1.2345678901234567e-80,
                           6.022e23,   -0.0,      3.14159e-7};
  for (double v : values) {
    const std::string s = format_g17(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_g17(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("trace CSV writer and reader agree") {
  SolverTrace trace;
  for (int k = 0; k <= 3; ++k) {
    TraceRow row;
    row.k = k;
    row.phi = 100.0 / (k + 1) + 1.0 / 3.0;
    row.eta = row.phi - 33.0;
    row.tau = 0.5 * k;
    row.eps = 2.0 * row.eta + row.tau;
    row.re = k == 0 ? std::nan("") : 1e-3 / k;
    row.wall_ms = 12.5 * k;
    trace.rows.push_back(row);
  }

  const std::string path = temp_path("trace.csv");

  SUBCASE("with timing") {
    write_trace_csv(trace, path, true);
    const auto back = read_trace_csv(path);
    REQUIRE(back.size() == trace.rows.size());
    for (size_t i = 0; i < back.size(); ++i) {
      CHECK(back[i].k == trace.rows[i].k);
      CHECK(back[i].phi == trace.rows[i].phi);
      CHECK(back[i].eta == trace.rows[i].eta);
      CHECK(back[i].tau == trace.rows[i].tau);
      CHECK(back[i].eps == trace.rows[i].eps);
      CHECK(back[i].wall_ms == trace.rows[i].wall_ms);
    }
    CHECK(std::isnan(back[0].re));
    CHECK(back[2].re == trace.rows[2].re);
  }

  SUBCASE("without timing the file carries no wall clock column") {
    write_trace_csv(trace, path, false);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "k,phi,eta,tau,eps,re");
    const auto back = read_trace_csv(path);
    REQUIRE(back.size() == trace.rows.size());
    CHECK(back[1].phi == trace.rows[1].phi);
    CHECK(back[1].wall_ms == 0.0);
  }

  SUBCASE("timing sidecar lists k and wall_ms only") {
    write_wall_csv(trace, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "k,wall_ms");
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 4);
  }

  std::remove(path.c_str());
}

TEST_CASE("identical traces serialize to identical bytes without timing") {
  SolverTrace trace;
  for (int k = 0; k <= 5; ++k) {
    TraceRow row;
    row.k = k;
    row.phi = 1.0 / (k + 3);
    row.eta = std::nan("");
    row.eps = std::nan("");
    row.re = k == 0 ? std::nan("") : 0.25 / k;
    row.wall_ms = k * 7.0 + 0.123;  // differs run to run in real life
    trace.rows.push_back(row);
  }
  SolverTrace other = trace;
  for (auto& row : other.rows) row.wall_ms += 42.0;

  const std::string pa = temp_path("bytes_a.csv");
  const std::string pb = temp_path("bytes_b.csv");
  write_trace_csv(trace, pa, false);
  write_trace_csv(other, pb, false);
  CHECK(slurp(pa) == slurp(pb));
  std::remove(pa.c_str());
  std::remove(pb.c_str());
}
