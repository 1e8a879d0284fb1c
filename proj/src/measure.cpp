#include "fractint/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "fractint/parallel.hpp"
#include "fractint/rng.hpp"

namespace fractint {

DiscreteMeasure::DiscreteMeasure(CellSet support, std::vector<double> weights, std::string label)
    : support_(std::move(support)), weights_(std::move(weights)), label_(std::move(label)) {
  if (weights_.size() != support_.size()) {
    throw InvalidArgument(fmt::format("{} weights for {} cells", weights_.size(), support_.size()));
  }
  if (support_.empty()) return;
  double total = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("measure weights must be positive and finite");
    total += w;
  }
  for (double& w : weights_) w /= total;
}

DiscreteMeasure uniform_measure(const CellSet& a, std::string label) {
  if (a.empty()) throw InvalidArgument("uniform measure on an empty set");
  std::vector<double> w(a.size(), 1.0 / static_cast<double>(a.size()));
  return DiscreteMeasure(a, std::move(w), std::move(label));
}

namespace {

// Farthest support center from x, measured over the bounding box of centers.
double bounding_reach(const CellSet& s, const Vec& x) {
  const GridSpec& g = s.grid();
  Coord lo = s.coord(0), hi = s.coord(0);
  for (std::size_t i = 1; i < s.size(); ++i) {
    const Coord c = s.coord(i);
    for (int a = 0; a < g.dim(); ++a) {
      lo[a] = std::min(lo[a], c[a]);
      hi[a] = std::max(hi[a], c[a]);
    }
  }
  const Vec clo = g.center(lo), chi = g.center(hi);
  double r2 = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    const double e = std::max(std::abs(x[a] - clo[a]), std::abs(x[a] - chi[a]));
    r2 += e * e;
  }
  return std::sqrt(r2);
}

double ball_sum(const DiscreteMeasure& mu, const Vec& x, double delta) {
  const GridSpec& g = mu.grid();
  const double h = g.cell_side();
  Coord lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < g.dim(); ++a) {
    lo[a] = static_cast<std::int64_t>(std::floor((x[a] - delta) / h)) - 1;
    hi[a] = static_cast<std::int64_t>(std::floor((x[a] + delta) / h)) + 1;
  }
  const double d2 = delta * delta;
  double m = 0.0;
  for_each_in_box(mu.support(), lo, hi, [&](std::size_t i) {
    if ((mu.support().center(i) - x).squaredNorm() <= d2) m += mu.weight(i);
  });
  return m;
}

}  // namespace

double ball_mass(const DiscreteMeasure& mu, const Vec& x, double delta) {
  const GridSpec& g = mu.grid();
  if (delta < 2.0 * g.cell_side()) {
    throw ScaleError(fmt::format("ball radius {} below two cell sides ({})", delta, 2.0 * g.cell_side()));
  }
  if (mu.size() == 0) return 0.0;
  if (delta >= bounding_reach(mu.support(), x)) return 1.0;
  return ball_sum(mu, x, delta);
}

AhlforsReport ad_regularity_check(const DiscreteMeasure& mu, double s, std::span<const double> deltas,
                                  double c_max, std::uint64_t seed) {
  if (deltas.empty()) throw InvalidArgument("empty delta range");
  if (mu.size() == 0) throw InvalidArgument("regularity check on an empty measure");
  const double eps = mu.grid().cell_side();
  for (double d : deltas) {
    if (d < 2.0 * eps) throw ScaleError(fmt::format("delta {} below two cell sides", d));
  }
  constexpr std::size_t kMaxCenters = 10000;
  std::vector<std::size_t> centers(mu.size());
  std::iota(centers.begin(), centers.end(), 0);
  if (centers.size() > kMaxCenters) {
    Rng rng(seed, 0x61686c);
    for (std::size_t i = 0; i < kMaxCenters; ++i) {
      std::swap(centers[i], centers[i + rng.below(centers.size() - i)]);
    }
    centers.resize(kMaxCenters);
    std::sort(centers.begin(), centers.end());
  }

  AhlforsReport rep;
  rep.s = s;
  rep.c_max = c_max;
  rep.centers = centers.size();
  rep.deltas.assign(deltas.begin(), deltas.end());
  rep.worst_ratio.assign(deltas.size(), 0.0);
  std::vector<double> worst(centers.size() * deltas.size());
  parallel_for(centers.size(), [&](std::size_t c) {
    const Vec x = mu.support().center(centers[c]);
    for (std::size_t j = 0; j < deltas.size(); ++j) {
      const double m = ball_mass(mu, x, deltas[j]);
      const double model = std::pow(deltas[j], s);
      worst[c * deltas.size() + j] = std::max(m / model, model / m);
    }
  });
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (std::size_t j = 0; j < deltas.size(); ++j) {
      rep.worst_ratio[j] = std::max(rep.worst_ratio[j], worst[c * deltas.size() + j]);
    }
  }
  rep.c_best = *std::max_element(rep.worst_ratio.begin(), rep.worst_ratio.end());
  rep.pass = rep.c_best <= c_max;
  return rep;
}

}  // namespace fractint
