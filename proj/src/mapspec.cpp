#include "fractint/mapspec.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "fractint/rng.hpp"

namespace fractint {

std::string to_string(Family f) {
  switch (f) {
    case Family::euclidean_distance: return "euclidean-distance";
    case Family::dot_product: return "dot-product";
    case Family::lm_norm: return "lm-norm";
    case Family::paraboloid_offset: return "paraboloid-offset";
    case Family::custom_polynomial: return "custom-polynomial";
  }
  return "?";
}

Family family_from_string(const std::string& name) {
  for (Family f : {Family::euclidean_distance, Family::dot_product, Family::lm_norm, Family::paraboloid_offset,
                   Family::custom_polynomial}) {
    if (to_string(f) == name) return f;
  }
  if (name == "distance") return Family::euclidean_distance;
  throw InvalidArgument(fmt::format("unknown map family '{}'", name));
}

namespace {

double lm(const Vec& u, int dim, int m) {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += std::pow(std::abs(u[a]), m);
  return std::pow(s, 1.0 / m);
}

// Gradient of the l^m norm at u.
Vec lm_grad(const Vec& u, int dim, int m) {
  const double n = lm(u, dim, m);
  Vec g = Vec::Zero();
  if (n == 0.0) return g;
  for (int a = 0; a < dim; ++a) g[a] = std::copysign(std::pow(std::abs(u[a]) / n, m - 1), u[a]);
  return g;
}

Mat lm_hessian(const Vec& u, int dim, int m) {
  const double n = lm(u, dim, m);
  Mat h = Mat::Zero();
  if (n == 0.0) return h;
  const Vec g = lm_grad(u, dim, m);
  for (int i = 0; i < dim; ++i) {
    h(i, i) = (m - 1) * std::pow(std::abs(u[i]) / n, m - 2) / n;
    for (int j = 0; j < dim; ++j) h(i, j) -= (m - 1) * g[i] * g[j] / n;
  }
  return h;
}

}  // namespace

double DefiningFunction::value(const Vec& x, const Vec& y) const {
  switch (family) {
    case Family::euclidean_distance:
      return (x - y).head(dim).norm();
    case Family::dot_product:
      return x.head(dim).dot(y.head(dim));
    case Family::lm_norm:
      return lm(x - y, dim, m);
    case Family::paraboloid_offset: {
      double r2 = 0.0;
      for (int a = 0; a + 1 < dim; ++a) r2 += (y[a] - x[a]) * (y[a] - x[a]);
      return (y[dim - 1] - x[dim - 1]) - r2;
    }
    case Family::custom_polynomial: {
      const auto qq = q.topLeftCorner(dim, dim);
      return x.head(dim).dot(qq * y.head(dim)) + a.head(dim).dot(x.head(dim)) + b.head(dim).dot(y.head(dim));
    }
  }
  return 0.0;
}

Vec DefiningFunction::grad_x(const Vec& x, const Vec& y) const {
  Vec g = Vec::Zero();
  switch (family) {
    case Family::euclidean_distance: {
      const double r = (x - y).head(dim).norm();
      if (r > 0.0) g.head(dim) = (x - y).head(dim) / r;
      break;
    }
    case Family::dot_product:
      g.head(dim) = y.head(dim);
      break;
    case Family::lm_norm:
      g = lm_grad(x - y, dim, m);
      break;
    case Family::paraboloid_offset:
      for (int i = 0; i + 1 < dim; ++i) g[i] = 2.0 * (y[i] - x[i]);
      g[dim - 1] = -1.0;
      break;
    case Family::custom_polynomial:
      g.head(dim) = q.topLeftCorner(dim, dim) * y.head(dim) + a.head(dim);
      break;
  }
  return g;
}

Vec DefiningFunction::grad_y(const Vec& x, const Vec& y) const {
  Vec g = Vec::Zero();
  switch (family) {
    case Family::euclidean_distance:
    case Family::lm_norm:
      g = -grad_x(x, y);
      break;
    case Family::dot_product:
      g.head(dim) = x.head(dim);
      break;
    case Family::paraboloid_offset:
      for (int i = 0; i + 1 < dim; ++i) g[i] = -2.0 * (y[i] - x[i]);
      g[dim - 1] = 1.0;
      break;
    case Family::custom_polynomial:
      g.head(dim) = q.topLeftCorner(dim, dim).transpose() * x.head(dim) + b.head(dim);
      break;
  }
  return g;
}

Mat DefiningFunction::mixed(const Vec& x, const Vec& y) const {
  Mat h = Mat::Zero();
  switch (family) {
    case Family::euclidean_distance: {
      const Vec u = x - y;
      const double r = u.head(dim).norm();
      if (r == 0.0) break;
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) h(i, j) = -((i == j ? 1.0 : 0.0) - u[i] * u[j] / (r * r)) / r;
      break;
    }
    case Family::dot_product:
      for (int i = 0; i < dim; ++i) h(i, i) = 1.0;
      break;
    case Family::lm_norm:
      h = -lm_hessian(x - y, dim, m);
      break;
    case Family::paraboloid_offset:
      for (int i = 0; i + 1 < dim; ++i) h(i, i) = 2.0;
      break;
    case Family::custom_polynomial:
      h.topLeftCorner(dim, dim) = q.topLeftCorner(dim, dim);
      break;
  }
  return h;
}

double DefiningFunction::lipschitz_y(const Vec& x, double reach) const {
  switch (family) {
    case Family::euclidean_distance:
    case Family::lm_norm:
      return 1.0;
    case Family::dot_product:
      return x.head(dim).norm();
    case Family::paraboloid_offset:
      return std::sqrt(1.0 + 4.0 * reach * reach);
    case Family::custom_polynomial: {
      const Eigen::MatrixXd qq = q.topLeftCorner(dim, dim);
      return (qq.transpose() * x.head(dim)).norm() + b.head(dim).norm() + 0.0 * reach;
    }
  }
  return 1.0;
}

double gradient_check(const DefiningFunction& phi, int points, std::uint64_t seed) {
  Rng rng(seed, 0x677264);
  const int d = phi.dim;
  const double h = 1e-5;
  double worst = 0.0;
  int done = 0;
  while (done < points) {
    Vec x = Vec::Zero(), y = Vec::Zero();
    for (int a = 0; a < d; ++a) {
      x[a] = rng.uniform();
      y[a] = rng.uniform();
    }
    if ((x - y).norm() < 0.25) continue;
    ++done;
    const Vec gx = phi.grad_x(x, y), gy = phi.grad_y(x, y);
    const Mat mx = phi.mixed(x, y);
    double scale = 1e-12;
    for (int a = 0; a < d; ++a) scale = std::max({scale, std::abs(gx[a]), std::abs(gy[a])});
    for (int a = 0; a < d; ++a) {
      const Vec e = h * unit_vec(a);
      const double fx = (phi.value(x + e, y) - phi.value(x - e, y)) / (2 * h);
      const double fy = (phi.value(x, y + e) - phi.value(x, y - e)) / (2 * h);
      worst = std::max({worst, std::abs(fx - gx[a]) / scale, std::abs(fy - gy[a]) / scale});
      // mixed derivative from differences of grad_x in y
      const Vec dgx = (phi.grad_x(x, y + e) - phi.grad_x(x, y - e)) / (2 * h);
      double mscale = 1e-12;
      for (int i = 0; i < d; ++i) mscale = std::max(mscale, mx.row(i).head(d).cwiseAbs().maxCoeff());
      for (int i = 0; i < d; ++i) worst = std::max(worst, std::abs(dgx[i] - mx(i, a)) / std::max(mscale, 1.0));
    }
  }
  return worst;
}

std::vector<LevelPair> sample_level_set(const DefiningFunction& phi, double t, int count, std::uint64_t seed) {
  Rng rng(seed, 0x6c7673);
  const int d = phi.dim;
  std::vector<LevelPair> out;
  constexpr int kSteps = 256;
  constexpr double kReach = 4.0;
  for (int attempt = 0; attempt < 200 * count && static_cast<int>(out.size()) < count; ++attempt) {
    Vec x = Vec::Zero(), u = Vec::Zero();
    for (int a = 0; a < d; ++a) x[a] = rng.uniform();
    double norm = 0.0;
    while (norm < 1e-6) {
      for (int a = 0; a < d; ++a) u[a] = rng.normal();
      norm = u.norm();
    }
    u /= norm;
    auto f = [&](double r) { return phi.value(x, x + r * u) - t; };
    double r0 = kReach / kSteps, f0 = f(r0);
    for (int s = 2; s <= kSteps; ++s) {
      const double r1 = kReach * s / kSteps, f1 = f(r1);
      if ((f0 <= 0.0) != (f1 <= 0.0)) {
        double lo = r0, hi = r1, flo = f0;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi), fm = f(mid);
          if ((fm <= 0.0) == (flo <= 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        out.push_back({x, x + 0.5 * (lo + hi) * u});
        break;
      }
      r0 = r1;
      f0 = f1;
    }
  }
  return out;
}

double phong_stein_det(const DefiningFunction& phi, const std::vector<LevelPair>& pairs) {
  if (pairs.empty()) throw InvalidArgument("no samples on the level set");
  const int d = phi.dim;
  double best = std::numeric_limits<double>::infinity();
  for (const LevelPair& p : pairs) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d + 1, d + 1);
    const Vec gx = phi.grad_x(p.x, p.y), gy = phi.grad_y(p.x, p.y);
    const Mat h = phi.mixed(p.x, p.y);
    for (int i = 0; i < d; ++i) {
      m(0, i + 1) = gx[i];
      m(i + 1, 0) = -gy[i];
      for (int j = 0; j < d; ++j) m(i + 1, j + 1) = h(i, j);
    }
    best = std::min(best, std::abs(m.determinant()));
  }
  return best;
}

double gradient_independence(const DefiningFunction& phi1, const DefiningFunction& phi2,
                             const std::vector<LevelPair>& pairs_x1, const std::vector<Vec>& x2) {
  if (pairs_x1.empty() || pairs_x1.size() != x2.size()) throw InvalidArgument("independence check needs matched samples");
  const int d = phi1.dim;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pairs_x1.size(); ++i) {
    const Vec& y = pairs_x1[i].y;
    Eigen::MatrixXd gy(2, d), gx(2, d);
    const Vec a = phi1.grad_y(pairs_x1[i].x, y), b = phi2.grad_y(x2[i], y);
    const Vec c = phi1.grad_x(pairs_x1[i].x, y), e = phi2.grad_x(x2[i], y);
    for (int j = 0; j < d; ++j) {
      gy(0, j) = a[j];
      gy(1, j) = b[j];
      gx(0, j) = c[j];
      gx(1, j) = e[j];
    }
    for (const Eigen::MatrixXd* g : {&gy, &gx}) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(*g);
      const auto& sv = svd.singularValues();
      worst = std::min(worst, sv[0] > 0.0 ? sv[1] / sv[0] : 0.0);
    }
  }
  return worst;
}

}  // namespace fractint
