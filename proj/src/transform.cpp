#include "fractint/transform.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace fractint {

namespace {

Eigen::MatrixXd block(const Mat& m, int dim) { return m.topLeftCorner(dim, dim); }

double poly(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

std::vector<double> derivative(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t p = 1; p < c.size(); ++p) d.push_back(static_cast<double>(p) * c[p]);
  return d;
}

void check_dim(int dim) {
  if (dim < 1 || dim > 3) throw InvalidArgument(fmt::format("transform dimension {} outside 1..3", dim));
}

}  // namespace

void Transform::finish_affine() {
  const Eigen::MatrixXd a = block(a_, dim_);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  if (sv[sv.size() - 1] <= 1e-12 * std::max(1.0, sv[0])) {
    throw InvalidArgument("affine map has a singular linear part");
  }
  lip_ = sv[0];
}

Transform Transform::identity(int dim) {
  check_dim(dim);
  Transform t;
  t.dim_ = dim;
  return t;
}

Transform Transform::translation(int dim, const Vec& z) {
  Transform t = identity(dim);
  for (int a = 0; a < dim; ++a) t.b_[a] = z[a];
  return t;
}

Transform Transform::rotation(int dim, const Mat& g, const Vec& center) {
  check_dim(dim);
  const Eigen::MatrixXd m = block(g, dim);
  const double err = (m.transpose() * m - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (err > 1e-9 || std::abs(std::abs(m.determinant()) - 1.0) > 1e-9) {
    throw InvalidArgument(fmt::format("rotation matrix is not orthogonal (defect {:.3g})", err));
  }
  Transform t;
  t.dim_ = dim;
  t.a_.topLeftCorner(dim, dim) = m;
  Vec c = Vec::Zero();
  for (int a = 0; a < dim; ++a) c[a] = center[a];
  t.b_ = c - t.a_ * c;
  t.lip_ = 1.0;
  return t;
}

Transform Transform::dilation(int dim, double factor, const Vec& center) {
  check_dim(dim);
  if (!(factor > 0.0)) throw InvalidArgument("dilation factor must be positive");
  Transform t;
  t.dim_ = dim;
  Vec c = Vec::Zero();
  for (int a = 0; a < dim; ++a) {
    t.a_(a, a) = factor;
    c[a] = center[a];
  }
  t.b_ = c - t.a_ * c;
  t.lip_ = factor;
  return t;
}

Transform Transform::affine(int dim, const Mat& a, const Vec& b) {
  check_dim(dim);
  Transform t;
  t.dim_ = dim;
  t.a_.topLeftCorner(dim, dim) = a.topLeftCorner(dim, dim);
  for (int i = 0; i < dim; ++i) t.b_[i] = b[i];
  t.finish_affine();
  return t;
}

Transform Transform::polynomial(int dim, std::vector<std::vector<double>> coeffs, double box_side) {
  check_dim(dim);
  if (static_cast<int>(coeffs.size()) != dim) {
    throw InvalidArgument("polynomial map needs one coefficient list per axis");
  }
  constexpr int kSamples = 1024;
  const double h = box_side / kSamples;
  double lip = 0.0;
  for (int i = 0; i < dim; ++i) {
    if (coeffs[i].empty()) coeffs[i] = {0.0};
    const auto d1 = derivative(coeffs[i]);
    const auto d2 = derivative(d1);
    double d2_bound = 0.0;
    for (std::size_t p = 0; p < d2.size(); ++p) d2_bound += std::abs(d2[p]) * std::pow(box_side, static_cast<double>(p));
    double sign = 0.0, dmax = 0.0;
    for (int s = 0; s <= kSamples; ++s) {
      const double v = d1.empty() ? 0.0 : poly(d1, s * h);
      if (v == 0.0 || (sign != 0.0 && (v > 0.0) != (sign > 0.0))) {
        throw InvalidArgument(fmt::format("polynomial map has a vanishing Jacobian near x_{} = {}", i, s * h));
      }
      sign = v;
      dmax = std::max(dmax, std::abs(v));
    }
    lip = std::max(lip, dmax + d2_bound * h / 2);
  }
  Transform t;
  t.dim_ = dim;
  t.coeffs_ = std::move(coeffs);
  t.lip_ = lip;
  return t;
}

Vec Transform::apply(const Vec& x) const {
  if (is_affine()) return a_ * x + b_;
  Vec y = Vec::Zero();
  for (int i = 0; i < dim_; ++i) y[i] = poly(coeffs_[i], x[i]);
  return y;
}

Transform Transform::inverse() const {
  if (!is_affine()) throw InvalidArgument("inverse is available for affine maps only");
  Transform t;
  t.dim_ = dim_;
  const Eigen::MatrixXd inv = block(a_, dim_).inverse();
  t.a_.topLeftCorner(dim_, dim_) = inv;
  t.b_ = -(t.a_ * b_);
  for (int a = dim_; a < 3; ++a) t.b_[a] = 0.0;
  t.finish_affine();
  return t;
}

bool Transform::signed_permutation() const {
  if (!is_affine()) return false;
  for (int r = 0; r < dim_; ++r) {
    int nonzero = 0;
    for (int c = 0; c < dim_; ++c) {
      const double v = a_(r, c);
      if (v == 0.0) continue;
      if (v != 1.0 && v != -1.0) return false;
      ++nonzero;
    }
    if (nonzero != 1) return false;
  }
  return true;
}

namespace {

struct Raster {
  GridSpec in;
  GridSpec out;
  double radius = 0.0;
};

Raster make_raster(const GridSpec& in, const Transform& t, const GridSpec& out) {
  if (in.dim() != t.dim() || out.dim() != t.dim()) throw InvalidArgument("transform dimension mismatch");
  Raster r{in, out, 0.0};
  bool aligned = t.signed_permutation() && in.k() == out.k();
  if (aligned) {
    const double inv = std::ldexp(1.0, in.k());
    for (int a = 0; a < t.dim(); ++a) {
      const double shift = t.offset()[a] * inv;
      if (shift != std::floor(shift)) aligned = false;
    }
  }
  if (aligned) {
    r.radius = out.cell_side() / 4;
  } else {
    r.radius = out.cell_side() / 2 + t.lipschitz() * in.half_diagonal() * (1.0 + 1e-12);
  }
  return r;
}

bool covers(const Vec& y, const Vec& c, double radius, int dim) {
  for (int a = 0; a < dim; ++a) {
    if (std::abs(y[a] - c[a]) > radius) return false;
  }
  return true;
}

// Calls fn(key) for output cells whose centers lie within the radius of y.
template <class Fn>
void forward_cells(const Raster& r, const Vec& y, Fn&& fn) {
  const int d = r.out.dim();
  const double inv = std::ldexp(1.0, r.out.k());
  const std::int64_t n = r.out.cells_per_axis();
  Coord lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < d; ++a) {
    lo[a] = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor((y[a] - r.radius) * inv - 0.5)) - 1);
    hi[a] = std::min<std::int64_t>(n - 1, static_cast<std::int64_t>(std::ceil((y[a] + r.radius) * inv - 0.5)) + 1);
    if (lo[a] > hi[a]) return;
  }
  Coord c{0, 0, 0};
  for (c[0] = lo[0]; c[0] <= hi[0]; ++c[0]) {
    for (c[1] = lo[1]; c[1] <= hi[1]; ++c[1]) {
      for (c[2] = lo[2]; c[2] <= hi[2]; ++c[2]) {
        if (covers(y, r.out.center(c), r.radius, d)) fn(r.out.encode(c));
      }
    }
  }
}

}  // namespace

CellSet transform(const CellSet& a, const Transform& t, const GridSpec& out) {
  const Raster r = make_raster(a.grid(), t, out);
  std::vector<CellKey> keys;
  keys.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    forward_cells(r, t.apply(a.center(i)), [&](CellKey k) { keys.push_back(k); });
  }
  return CellSet(out, std::move(keys));
}

CellSet transform_into(const CellSet& a, const Transform& t, const CellSet& mask) {
  const Raster r = make_raster(a.grid(), t, mask.grid());
  const int d = t.dim();
  std::vector<CellKey> keys;
  if (!t.is_affine() || a.size() <= mask.size()) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      forward_cells(r, t.apply(a.center(i)), [&](CellKey k) {
        if (mask.contains(k)) keys.push_back(k);
      });
    }
    return CellSet(mask.grid(), std::move(keys));
  }
  // Pull back each mask cell and look for a source center that covers it.
  const Transform back = t.inverse();
  const Mat& ainv = back.linear();
  const double inv_in = std::ldexp(1.0, r.in.k());
  Vec half = Vec::Zero();
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) half[i] += std::abs(ainv(i, j)) * r.radius;
  }
  for (std::size_t m = 0; m < mask.size(); ++m) {
    const Vec c = mask.center(m);
    const Vec pre = back.apply(c);
    Coord lo{0, 0, 0}, hi{0, 0, 0};
    for (int i = 0; i < d; ++i) {
      lo[i] = static_cast<std::int64_t>(std::floor((pre[i] - half[i]) * inv_in - 0.5)) - 1;
      hi[i] = static_cast<std::int64_t>(std::ceil((pre[i] + half[i]) * inv_in - 0.5)) + 1;
    }
    const bool hit = any_in_box(a, lo, hi, [&](std::size_t b) {
      return covers(t.apply(a.center(b)), c, r.radius, d);
    });
    if (hit) keys.push_back(mask.key(m));
  }
  return CellSet(mask.grid(), std::move(keys));
}

}  // namespace fractint
