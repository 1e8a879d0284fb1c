#include "fractint/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "fractint/parallel.hpp"
#include "fractint/rng.hpp"
#include "fractint/spectrum.hpp"

namespace fractint {

std::size_t box_count(const CellSet& a, int j) {
  if (j < 0 || j > a.grid().k()) {
    throw InvalidArgument(fmt::format("box-count level {} outside 0..{}", j, a.grid().k()));
  }
  return coarsen(a, j).size();
}

DecayFit minkowski_dim(const CellSet& a, int j_lo, int j_hi) {
  if (j_hi - j_lo + 1 < 4) throw InvalidArgument("Minkowski fit needs at least 4 scales");
  if (a.empty()) throw InvalidArgument("Minkowski dimension of an empty set");
  std::vector<double> x, y;
  for (int j = j_lo; j <= j_hi; ++j) {
    x.push_back(j);
    y.push_back(std::log2(static_cast<double>(box_count(a, j))));
  }
  DecayFit f = fit_line(x, y);
  f.scale_lo = std::exp2(-j_hi);
  f.scale_hi = std::exp2(-j_lo);
  return f;
}

namespace {

void check_exponent(double s, int d) {
  if (!(s > 0.0) || !(s < d)) throw InvalidArgument(fmt::format("energy exponent {} outside (0, {})", s, d));
}

constexpr double kDirectPairs = 5e7;

}  // namespace

EnergyValue energy_spatial(const DiscreteMeasure& mu, double s) {
  const GridSpec& g = mu.grid();
  check_exponent(s, g.dim());
  if (mu.size() == 0) throw InvalidArgument("energy of an empty measure");
  const double eps = g.cell_side();
  const double diag = std::pow(eps / 2, -s);
  const auto n = mu.size();
  EnergyValue e{s, 0.0, EnergyMethod::spatial};
  if (static_cast<double>(n) * static_cast<double>(n) <= kDirectPairs) {
    std::vector<double> rows(n);
    parallel_for(n, [&](std::size_t i) {
      const Vec ci = mu.support().center(i);
      double acc = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        acc += mu.weight(j) * std::pow((mu.support().center(j) - ci).squaredNorm(), -s / 2);
      }
      rows[i] = mu.weight(i) * (2.0 * acc + mu.weight(i) * diag);
    });
    e.value = std::accumulate(rows.begin(), rows.end(), 0.0);
    return e;
  }
  const Autocorrelation ac = autocorrelation(mu);
  const int d = ac.dim;
  double acc = 0.0;
  std::array<std::int64_t, 3> idx{0, 0, 0};
  for (std::size_t f = 0; f < ac.values.size(); ++f) {
    std::size_t r = f;
    for (int a = d - 1; a >= 0; --a) {
      idx[a] = static_cast<std::int64_t>(r % static_cast<std::size_t>(ac.size[a]));
      r /= static_cast<std::size_t>(ac.size[a]);
    }
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) {
      const std::int64_t half = ac.size[a] / 2;
      const double v = static_cast<double>(idx[a] < half ? idx[a] : idx[a] - ac.size[a]);
      r2 += v * v;
    }
    const double kernel = r2 == 0.0 ? diag : std::pow(r2 * eps * eps, -s / 2);
    acc += ac.values[f] * kernel;
  }
  e.value = acc;
  return e;
}

double energy_constant(double s, int d) {
  return std::pow(std::numbers::pi, s - d / 2.0) * std::tgamma((d - s) / 2) / std::tgamma(s / 2);
}

EnergyValue energy_fourier(const DiscreteMeasure& mu, double s, double xi_max) {
  const GridSpec& g = mu.grid();
  const int d = g.dim();
  check_exponent(s, d);
  if (mu.size() == 0) throw InvalidArgument("energy of an empty measure");
  const double cap = std::ldexp(1.0, g.k() - 1);
  if (!(xi_max > 0.0) || xi_max > cap) {
    throw ScaleError(fmt::format("frequency cap {} outside (0, 2^(k-1) = {}]", xi_max, cap));
  }
  const DenseLayout l = dense_layout(mu);
  std::int64_t extent = 1;
  for (int a = 0; a < d; ++a) extent = std::max(extent, l.extent[a]);
  const std::int64_t m = 2 * extent;
  const double period = static_cast<double>(m) * g.cell_side();
  const std::vector<double> power = power_spectrum(mu, m);
  const std::array<std::int64_t, 3> n{m, d > 1 ? m : 1, d > 2 ? m : 1};
  const double r2max = xi_max * xi_max * period * period;
  double acc = 0.0;
  std::array<std::int64_t, 3> idx{0, 0, 0};
  for (std::size_t f = 0; f < power.size(); ++f) {
    std::size_t r = f;
    for (int a = d - 1; a >= 0; --a) {
      idx[a] = static_cast<std::int64_t>(r % static_cast<std::size_t>(n[a]));
      r /= static_cast<std::size_t>(n[a]);
    }
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) {
      const double v = static_cast<double>(idx[a] <= m / 2 ? idx[a] : idx[a] - m);
      r2 += v * v;
    }
    if (r2 == 0.0 || r2 > r2max) continue;
    acc += power[f] * std::pow(r2 / (period * period), (s - d) / 2.0);
  }
  const double cell_volume = std::pow(period, -d);
  const double unit_ball = std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1);
  const double rho = std::pow(cell_volume / unit_ball, 1.0 / d);
  const double surface = 2 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
  const double origin_term = surface * std::pow(rho, s) / s;
  return {s, energy_constant(s, d) * (acc * cell_volume + origin_term), EnergyMethod::fourier};
}

std::complex<double> fourier_transform(const DiscreteMeasure& mu, const Vec& xi) {
  double re = 0.0, im = 0.0;
  const int d = mu.grid().dim();
  for (std::size_t j = 0; j < mu.size(); ++j) {
    const Vec c = mu.support().center(j);
    double dot = 0.0;
    for (int a = 0; a < d; ++a) dot += c[a] * xi[a];
    const double ph = -2.0 * std::numbers::pi * dot;
    re += mu.weight(j) * std::cos(ph);
    im += mu.weight(j) * std::sin(ph);
  }
  return {re, im};
}

std::vector<std::complex<double>> fourier_transform(const DiscreteMeasure& mu, std::span<const Vec> xis) {
  std::vector<std::complex<double>> out(xis.size());
  parallel_for(xis.size(), [&](std::size_t i) { out[i] = fourier_transform(mu, xis[i]); });
  return out;
}

std::vector<Vec> sample_directions(int dim, int n, std::uint64_t seed) {
  Rng rng(seed, 0x646972);
  std::vector<Vec> dirs;
  for (int i = 0; i < n; ++i) {
    Vec v = Vec::Zero();
    if (dim == 1) {
      v[0] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    } else if (dim == 2) {
      const double th = 2.0 * std::numbers::pi * rng.uniform();
      v[0] = std::cos(th);
      v[1] = std::sin(th);
    } else {
      double norm = 0.0;
      while (norm < 1e-6) {
        for (int a = 0; a < 3; ++a) v[a] = rng.normal();
        norm = v.norm();
      }
      v /= norm;
    }
    dirs.push_back(v);
  }
  for (int a = 0; a < dim; ++a) {
    dirs.push_back(unit_vec(a));
    dirs.push_back(-unit_vec(a));
  }
  return dirs;
}

DecayReport fourier_decay(const DiscreteMeasure& mu, const DecayOptions& opt) {
  const GridSpec& g = mu.grid();
  const int a_lo = static_cast<int>(std::floor(std::log2(opt.xi_lo) + 1e-9));
  const int a_hi = static_cast<int>(std::floor(std::log2(opt.xi_hi) + 1e-9));
  if (a_hi - a_lo < 4) throw InvalidArgument("Fourier decay needs at least 4 octaves of frequency");
  if (opt.xi_hi > std::ldexp(1.0, g.k() - 1)) {
    throw ScaleError(fmt::format("frequency {} beyond the cap 2^(k-1)", opt.xi_hi));
  }
  if (opt.directions < 64) throw InvalidArgument("Fourier decay needs at least 64 directions");
  const std::vector<Vec> dirs = sample_directions(g.dim(), opt.directions, opt.seed);
  Rng rng(opt.seed, 0x726164);
  DecayReport rep;
  std::vector<Vec> xis;
  std::vector<std::size_t> shell_of;
  for (int a = a_lo; a < a_hi; ++a) {
    const double start = std::ldexp(1.0, a);
    std::vector<double> radii{start};
    for (int r = 1; r < opt.radii_per_shell; ++r) radii.push_back(start * std::exp2(rng.uniform()));
    for (double r : radii) {
      for (const Vec& u : dirs) {
        xis.push_back(r * u);
        shell_of.push_back(rep.shell_start.size());
      }
    }
    rep.shell_start.push_back(start);
  }
  const auto values = fourier_transform(mu, xis);
  rep.shell_sup.assign(rep.shell_start.size(), 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    rep.shell_sup[shell_of[i]] = std::max(rep.shell_sup[shell_of[i]], std::abs(values[i]));
  }
  std::vector<double> x, y;
  for (std::size_t s = 0; s < rep.shell_start.size(); ++s) {
    x.push_back(std::log2(rep.shell_start[s]));
    y.push_back(std::log2(std::max(rep.shell_sup[s], 1e-300)));
  }
  rep.fit = fit_line(x, y);
  rep.beta = -2.0 * rep.fit.slope;
  return rep;
}

DecayFit axis_decay(const DiscreteMeasure& mu, double base, int j_lo, int j_hi) {
  const int d = mu.grid().dim();
  std::vector<double> x, y;
  for (int j = j_lo; j <= j_hi; ++j) {
    const double r = std::pow(base, j);
    if (r > std::ldexp(1.0, mu.grid().k() - 1)) throw ScaleError(fmt::format("frequency {} beyond the cap 2^(k-1)", r));
    double sup = 0.0;
    for (int a = 0; a < d; ++a) sup = std::max(sup, std::abs(fourier_transform(mu, r * unit_vec(a))));
    x.push_back(std::log2(r));
    y.push_back(std::log2(std::max(sup, 1e-300)));
  }
  return fit_line(x, y);
}

SlabReport hyperplane_exponent(const DiscreteMeasure& mu, const Vec& origin, int directions,
                               std::span<const double> deltas, std::uint64_t seed) {
  const GridSpec& g = mu.grid();
  if (directions < 32) throw InvalidArgument("hyperplane exponent needs at least 32 directions");
  if (deltas.size() < 4) throw InvalidArgument("hyperplane exponent needs at least 4 slab widths");
  const double lo = *std::min_element(deltas.begin(), deltas.end());
  const double hi = *std::max_element(deltas.begin(), deltas.end());
  if (lo < 2.0 * g.cell_side()) throw ScaleError(fmt::format("slab width {} below two cell sides", lo));
  if (hi / lo < 8.0 * (1 - 1e-12)) throw InvalidArgument("slab widths must span at least 3 octaves");
  const std::vector<Vec> dirs = sample_directions(g.dim(), directions, seed);
  std::vector<double> masses(dirs.size() * deltas.size());
  parallel_for(dirs.size(), [&](std::size_t k) {
    std::vector<std::pair<double, double>> proj(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
      proj[i] = {(mu.support().center(i) - origin).dot(dirs[k]), mu.weight(i)};
    }
    std::sort(proj.begin(), proj.end());
    std::vector<double> prefix(proj.size() + 1, 0.0);
    for (std::size_t i = 0; i < proj.size(); ++i) prefix[i + 1] = prefix[i] + proj[i].second;
    for (std::size_t j = 0; j < deltas.size(); ++j) {
      const auto first = std::lower_bound(proj.begin(), proj.end(), std::make_pair(-deltas[j], -1.0));
      const auto last = std::upper_bound(proj.begin(), proj.end(), std::make_pair(deltas[j], 2.0));
      masses[k * deltas.size() + j] = prefix[static_cast<std::size_t>(last - proj.begin())] -
                                      prefix[static_cast<std::size_t>(first - proj.begin())];
    }
  });
  SlabReport rep;
  rep.deltas.assign(deltas.begin(), deltas.end());
  rep.sup_mass.assign(deltas.size(), 0.0);
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    for (std::size_t j = 0; j < deltas.size(); ++j) rep.sup_mass[j] = std::max(rep.sup_mass[j], masses[k * deltas.size() + j]);
  }
  std::vector<double> x, y;
  for (std::size_t j = 0; j < deltas.size(); ++j) {
    x.push_back(std::log2(deltas[j]));
    y.push_back(std::log2(std::max(rep.sup_mass[j], 1e-300)));
  }
  rep.fit = fit_line(x, y);
  return rep;
}

}  // namespace fractint
