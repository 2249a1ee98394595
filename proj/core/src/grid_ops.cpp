#include "petrec/grid_ops.hpp"

namespace petrec {
namespace {

// The four stencil primitives. Each writes a full d-vector; out must not
// alias in. Column variants act within image rows, row variants across them.

void diff_cols(const Vec& in, Vec& out, int n) {
  for (int r = 0; r < n; ++r) {
    const Eigen::Index base = static_cast<Eigen::Index>(r) * n;
    out[base] = 0.0;
    for (int c = 1; c < n; ++c) out[base + c] = in[base + c] - in[base + c - 1];
  }
}

void diffT_cols(const Vec& in, Vec& out, int n) {
  for (int r = 0; r < n; ++r) {
    const Eigen::Index base = static_cast<Eigen::Index>(r) * n;
    for (int c = 0; c < n; ++c) {
      double acc = 0.0;
      if (c >= 1) acc += in[base + c];
      if (c + 1 < n) acc -= in[base + c + 1];
      out[base + c] = acc;
    }
  }
}

void diff_rows(const Vec& in, Vec& out, int n) {
  for (int c = 0; c < n; ++c) out[c] = 0.0;
  for (int r = 1; r < n; ++r) {
    const Eigen::Index base = static_cast<Eigen::Index>(r) * n;
    for (int c = 0; c < n; ++c) out[base + c] = in[base + c] - in[base - n + c];
  }
}

void diffT_rows(const Vec& in, Vec& out, int n) {
  for (int r = 0; r < n; ++r) {
    const Eigen::Index base = static_cast<Eigen::Index>(r) * n;
    for (int c = 0; c < n; ++c) {
      double acc = 0.0;
      if (r >= 1) acc += in[base + c];
      if (r + 1 < n) acc -= in[base + n + c];
      out[base + c] = acc;
    }
  }
}

}  // namespace

FirstOrderField apply_first_diff(const Image& f) {
  FirstOrderField out(f.n);
  const int d = f.d();
  Vec tmp(d);
  diff_cols(f.v, tmp, f.n);
  out.block(0) = tmp;
  diff_rows(f.v, tmp, f.n);
  out.block(1) = tmp;
  return out;
}

Image apply_first_diff_adjoint(const FirstOrderField& u) {
  Image out(u.n);
  const int d = u.d();
  Vec part(d), tmp(d);
  Vec b0 = u.block(0), b1 = u.block(1);
  diffT_cols(b0, part, u.n);
  out.v = part;
  diffT_rows(b1, tmp, u.n);
  out.v += tmp;
  return out;
}

SecondOrderField apply_second_diff(const Image& f) {
  SecondOrderField out(f.n);
  const int n = f.n;
  const int d = f.d();
  Vec dc(d), dr(d), tmp(d);
  diff_cols(f.v, dc, n);
  diff_rows(f.v, dr, n);

  diffT_cols(dc, tmp, n);  // block 0: -D^T D within rows
  out.block(0) = -tmp;
  diffT_rows(dc, tmp, n);  // block 1: -D^T across rows of the horizontal diff
  out.block(1) = -tmp;
  diffT_rows(dr, tmp, n);  // block 2: -D^T D across rows
  out.block(2) = -tmp;
  diffT_cols(f.v, tmp, n);  // block 3: D across rows of -D^T within rows
  Vec tmp2(d);
  diff_rows(tmp, tmp2, n);
  out.block(3) = -tmp2;
  return out;
}

Image apply_second_diff_adjoint(const SecondOrderField& c) {
  // Blocks 0 and 2 are symmetric; blocks 1 and 3 transpose to
  // (-D) (x) D^T and D^T (x) (-D) respectively.
  Image out(c.n);
  const int n = c.n;
  const int d = c.d();
  Vec tmp(d), tmp2(d);
  Vec acc = Vec::Zero(d);

  Vec b = c.block(0);
  diff_cols(b, tmp, n);
  diffT_cols(tmp, tmp2, n);
  acc -= tmp2;

  b = c.block(1);
  diffT_cols(b, tmp, n);
  diff_rows(tmp, tmp2, n);
  acc -= tmp2;

  b = c.block(2);
  diff_rows(b, tmp, n);
  diffT_rows(tmp, tmp2, n);
  acc -= tmp2;

  b = c.block(3);
  diff_cols(b, tmp, n);
  diffT_rows(tmp, tmp2, n);
  acc -= tmp2;

  out.v = acc;
  return out;
}

Vec FirstDiffOp::apply(const Vec& x) const {
  if (x.size() != cols()) throw std::invalid_argument("FirstDiffOp: size mismatch");
  return apply_first_diff(Image(n_, x)).v;
}

Vec FirstDiffOp::apply_adjoint(const Vec& y) const {
  if (y.size() != rows()) throw std::invalid_argument("FirstDiffOp: size mismatch");
  return apply_first_diff_adjoint(FirstOrderField(n_, y)).v;
}

Vec SecondDiffOp::apply(const Vec& x) const {
  if (x.size() != cols()) throw std::invalid_argument("SecondDiffOp: size mismatch");
  return apply_second_diff(Image(n_, x)).v;
}

Vec SecondDiffOp::apply_adjoint(const Vec& y) const {
  if (y.size() != rows()) throw std::invalid_argument("SecondDiffOp: size mismatch");
  return apply_second_diff_adjoint(SecondOrderField(n_, y)).v;
}

}  // namespace petrec
