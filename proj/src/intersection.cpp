#include "fractint/intersection.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include <Eigen/Geometry>
#include <fmt/format.h>

#include "fractint/estimators.hpp"
#include "fractint/parallel.hpp"
#include "fractint/rng.hpp"
#include "fractint/transform.hpp"

namespace fractint {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kMinSamples = 64;

void check_ladder(std::span<const int> ladder, int k) {
  if (ladder.empty()) throw InvalidArgument("empty scale ladder");
  if (ladder.size() < 4) throw InvalidArgument("scale ladder needs at least 4 levels");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] < 0 || ladder[i] > k) throw InvalidArgument(fmt::format("ladder level {} outside [0, {}]", ladder[i], k));
    if (i > 0 && ladder[i] <= ladder[i - 1]) throw InvalidArgument("ladder levels must increase");
  }
}

void check_samples(std::size_t n) {
  if (n < kMinSamples) throw InvalidArgument(fmt::format("{} samples, need at least {}", n, kMinSamples));
}

void check_compatible(const Construction& a, const Construction& b) {
  if (a.grid().dim() != b.grid().dim() || a.grid().k() != b.grid().k()) {
    throw InvalidArgument(fmt::format("incompatible grids: d={} k={} against d={} k={}", a.grid().dim(), a.grid().k(),
                                      b.grid().dim(), b.grid().k()));
  }
}

Mat linear_block(const Mat& m, int d) {
  Mat out = Mat::Identity();
  out.topLeftCorner(d, d) = m.topLeftCorner(d, d);
  return out;
}

CoveringRecord make_record(std::size_t index, const WeightedPoint& p, const CellSet& fine, std::span<const int> ladder) {
  CoveringRecord r;
  r.index = index;
  r.x = p.x;
  r.weight = p.weight;
  r.counts = covering_counts(fine, ladder);
  r.gamma = ladder_slope(r.counts, ladder);
  return r;
}

// Records for T(y) = x - m y over all x; m is shared by every sample.
void intersect_all(const Construction& a, const Construction& b, const Mat& m, double t,
                   std::span<const WeightedPoint> xs, std::span<const Vec> shifted, std::span<const int> ladder,
                   std::span<CoveringRecord> out, std::size_t first_index) {
  parallel_for(xs.size(), [&](std::size_t i) {
    CoveringRecord r = make_record(first_index + i, xs[i], reflected_intersection(a, b, m, shifted[i]), ladder);
    r.t = t;
    out[i] = std::move(r);
  });
}

std::vector<Vec> positions(std::span<const WeightedPoint> xs) {
  std::vector<Vec> v;
  v.reserve(xs.size());
  for (const WeightedPoint& p : xs) v.push_back(p.x);
  return v;
}

PredictInputs base_inputs(const Construction& a, const Construction* b, const ExperimentOptions& opt) {
  PredictInputs in;
  in.d = a.grid().dim();
  in.s_a = a.design_dimension;
  in.s_b = b ? b->design_dimension : 0.0;
  in.alpha = opt.alpha;
  in.alpha2 = opt.alpha2;
  return in;
}

}  // namespace

std::string to_string(Verdict v) { return v == Verdict::respected ? "bound-respected" : "bound-violated"; }

std::vector<WeightedPoint> psi_samples(const PsiGrid& grid) {
  const int d = grid.dim;
  if (d < 1 || d > 3 || grid.per_axis < 1) throw InvalidArgument("bad sampling grid");
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(grid.per_axis);
  std::vector<WeightedPoint> out(total);
  double sum = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rest = i;
    WeightedPoint p;
    for (int a = d - 1; a >= 0; --a) {
      const double u = (static_cast<double>(rest % grid.per_axis) + 0.5) / grid.per_axis;
      rest /= grid.per_axis;
      p.x[a] = grid.lo[a] + u * (grid.hi[a] - grid.lo[a]);
      p.weight *= 1.0 - std::abs(2.0 * u - 1.0);
    }
    sum += p.weight;
    out[i] = p;
  }
  for (WeightedPoint& p : out) p.weight /= sum;
  return out;
}

PsiGrid overlap_region(const Construction& a, const Construction& b, int per_axis) {
  check_compatible(a, b);
  if (a.cells().empty() || b.cells().empty()) throw InvalidArgument("overlap region of an empty set");
  const int d = a.grid().dim();
  auto bounds = [d](const Construction& c, Vec& lo, Vec& hi) {
    const Coord first = c.cells().coord(0);
    Coord mn = first, mx = first;
    for (std::size_t i = 1; i < c.cells().size(); ++i) {
      const Coord q = c.cells().coord(i);
      for (int a = 0; a < d; ++a) {
        mn[a] = std::min(mn[a], q[a]);
        mx[a] = std::max(mx[a], q[a]);
      }
    }
    const double eps = c.grid().cell_side();
    for (int a = 0; a < d; ++a) {
      lo[a] = mn[a] * eps - c.origin[a];
      hi[a] = (mx[a] + 1) * eps - c.origin[a];
    }
  };
  Vec alo = Vec::Zero(), ahi = Vec::Zero(), blo = Vec::Zero(), bhi = Vec::Zero();
  bounds(a, alo, ahi);
  bounds(b, blo, bhi);
  PsiGrid g;
  g.dim = d;
  g.per_axis = per_axis;
  g.lo = Vec::Zero();
  g.hi = Vec::Zero();
  for (int i = 0; i < d; ++i) {
    const double lo = alo[i] + blo[i], hi = ahi[i] + bhi[i];
    const double mid = 0.5 * (lo + hi), half = 0.25 * (hi - lo);
    g.lo[i] = mid - half;
    g.hi[i] = mid + half;
  }
  return g;
}

std::vector<WeightedPoint> measure_samples(const Construction& mu, int n, std::uint64_t seed) {
  const DiscreteMeasure& m = mu.measure;
  if (m.size() == 0) throw InvalidArgument("sampling from an empty measure");
  std::vector<double> cumulative(m.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) cumulative[i] = acc += m.weight(i);
  Rng rng(seed, 0x78736d70);
  const int d = m.grid().dim();
  const double eps = m.grid().cell_side();
  std::vector<WeightedPoint> out(static_cast<std::size_t>(n));
  for (WeightedPoint& p : out) {
    const std::size_t i = rng.discrete(cumulative);
    const Vec c = m.support().center(i);
    for (int a = 0; a < d; ++a) p.x[a] = c[a] + (rng.uniform() - 0.5) * eps - mu.origin[a];
    p.weight = 1.0;
  }
  return out;
}

std::vector<Mat> haar_sample(int dim, int n, std::uint64_t seed) {
  if (dim != 2 && dim != 3) throw InvalidArgument("Haar sampling needs d = 2 or 3");
  Rng rng(seed, 0x68616172);
  std::vector<Mat> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Mat g = Mat::Identity();
    if (dim == 2) {
      const double th = 2.0 * M_PI * rng.uniform();
      g(0, 0) = std::cos(th);
      g(0, 1) = -std::sin(th);
      g(1, 0) = std::sin(th);
      g(1, 1) = std::cos(th);
      if (rng.uniform() < 0.5) g.col(1) *= -1.0;
    } else {
      Eigen::Vector4d q;
      do {
        for (int a = 0; a < 4; ++a) q[a] = rng.normal();
      } while (q.norm() < 1e-12);
      q.normalize();
      g = Eigen::Quaterniond(q[0], q[1], q[2], q[3]).toRotationMatrix();
      if (rng.uniform() < 0.5) g = -g;
    }
    out.push_back(g);
  }
  return out;
}

bool claims_violation(const ExperimentResult& r) {
  return r.verdict == Verdict::violated && r.threshold.hypotheses_hold;
}

double ladder_slope(std::span<const std::int64_t> counts, std::span<const int> ladder) {
  if (counts.size() != ladder.size() || counts.empty()) throw InvalidArgument("counts do not match the ladder");
  if (counts.back() == 0) return kNegInf;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] <= 0) continue;
    x.push_back(ladder[i]);
    y.push_back(std::log2(static_cast<double>(counts[i])));
  }
  if (x.size() < 4) return kNegInf;
  return fit_line(x, y).slope;
}

std::vector<std::int64_t> covering_counts(const CellSet& fine, std::span<const int> ladder) {
  std::vector<std::int64_t> out(ladder.size());
  CellSet cur = fine;
  for (std::size_t i = ladder.size(); i-- > 0;) {
    cur = coarsen(cur, ladder[i]);
    out[i] = static_cast<std::int64_t>(cur.size());
  }
  return out;
}

ExperimentResult finalize(std::string experiment, std::vector<int> ladder, std::vector<CoveringRecord> records,
                          const Thresholds& threshold, double tolerance, double margin) {
  ExperimentResult r;
  r.experiment = std::move(experiment);
  r.ladder = std::move(ladder);
  r.records = std::move(records);
  r.threshold = threshold;
  r.tolerance = tolerance;
  r.margin = margin;
  const std::size_t n = r.ladder.size();
  r.averaged_counts.assign(n, 0.0);
  double total = 0.0;
  for (const CoveringRecord& rec : r.records) {
    if (rec.counts.size() != n) throw InvalidArgument("record does not match the ladder");
    total += rec.weight;
    for (std::size_t i = 0; i < n; ++i) r.averaged_counts[i] += rec.weight * static_cast<double>(rec.counts[i]);
  }
  if (total <= 0.0) throw InvalidArgument("records carry no weight");
  for (double& v : r.averaged_counts) v /= total;

  if (n >= 4 && r.averaged_counts.back() > 0.0) {
    std::vector<double> x(r.ladder.begin(), r.ladder.end()), y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = std::log2(r.averaged_counts[i]);
    r.fit = fit_line(x, y);
  } else {
    r.fit.slope = kNegInf;
    r.fit.n_points = static_cast<int>(n);
  }
  r.verdict = r.fit.slope <= threshold.intersection + tolerance ? Verdict::respected : Verdict::violated;

  double above = 0.0;
  for (const CoveringRecord& rec : r.records) {
    if (rec.gamma > threshold.intersection + margin) above += rec.weight;
  }
  r.exceptional_fraction = above / total;
  return r;
}

CellSet reflected_intersection(const Construction& a, const Construction& b, const Mat& m, const Vec& x) {
  check_compatible(a, b);
  const int d = a.grid().dim();
  const Mat lin = linear_block(m, d);
  Vec off = Vec::Zero();
  off.head(d) = (x + lin * b.origin + a.origin).head(d);
  const Transform t = Transform::affine(d, -lin, off);
  return transform_into(b.cells(), t, a.cells());
}

std::int64_t covering_number(const Construction& a, const Construction& b, const Mat& m, const Vec& x, int j) {
  check_compatible(a, b);
  if (j < 0 || j > a.grid().k()) throw InvalidArgument(fmt::format("level {} outside [0, {}]", j, a.grid().k()));
  return static_cast<std::int64_t>(coarsen(reflected_intersection(a, b, m, x), j).size());
}

LevelSetIndex::LevelSetIndex(const Construction& a) : a_(&a) {
  const int k = a.grid().k();
  top_ = std::min(k, 2);
  levels_.resize(static_cast<std::size_t>(k - top_ + 1));
  levels_.back() = a.cells();
  for (int j = k - 1; j >= top_; --j) levels_[static_cast<std::size_t>(j - top_)] = coarsen(levels_[static_cast<std::size_t>(j - top_ + 1)], j);
}

CellSet LevelSetIndex::cells(std::span<const DefiningFunction> phi, std::span<const Vec> x,
                             std::span<const double> t) const {
  if (phi.empty() || phi.size() != x.size() || phi.size() != t.size()) throw InvalidArgument("level set arity mismatch");
  const GridSpec& fine = a_->grid();
  const int d = fine.dim();
  const int k = fine.k();
  const double eps = fine.cell_side();
  const double reach = static_cast<double>(fine.box_side()) * std::sqrt(static_cast<double>(d));
  std::vector<double> lip(phi.size());
  for (std::size_t l = 0; l < phi.size(); ++l) lip[l] = phi[l].lipschitz_y(x[l], reach);

  std::vector<CellKey> cur(levels_.front().keys().begin(), levels_.front().keys().end());
  for (int j = top_; j <= k; ++j) {
    const GridSpec g = fine.at_level(j);
    // a fine center passes at max(eps, Lip * half diagonal); coarse cells
    // keep room for every descendant center
    const double spread = j == k ? 0.0 : g.half_diagonal() - fine.half_diagonal();
    std::vector<CellKey> kept;
    for (CellKey key : cur) {
      const Vec y = g.center(key) - a_->origin;
      bool ok = true;
      for (std::size_t l = 0; l < phi.size() && ok; ++l) {
        const double slack = std::max(eps, lip[l] * fine.half_diagonal()) + lip[l] * spread;
        ok = std::abs(phi[l].value(x[l], y) - t[l]) <= slack;
      }
      if (ok) kept.push_back(key);
    }
    if (j == k) return CellSet(fine, std::move(kept));
    const CellSet& next = levels_[static_cast<std::size_t>(j + 1 - top_)];
    const GridSpec& ng = next.grid();
    cur.clear();
    for (CellKey key : kept) {
      const Coord c = g.decode(key);
      for (int bits = 0; bits < (1 << d); ++bits) {
        Coord ch{0, 0, 0};
        for (int a = 0; a < d; ++a) ch[a] = 2 * c[a] + ((bits >> a) & 1);
        const CellKey ck = ng.encode(ch);
        if (next.contains(ck)) cur.push_back(ck);
      }
    }
    std::sort(cur.begin(), cur.end());
  }
  return CellSet(fine);
}

ExperimentResult translation_experiment(const Construction& a, const Construction& b, const Transform& diffeo,
                                        std::span<const WeightedPoint> xs, const ExperimentOptions& opt) {
  check_compatible(a, b);
  check_ladder(opt.ladder, a.grid().k());
  check_samples(xs.size());
  std::vector<Vec> shifted;
  for (const WeightedPoint& p : xs) shifted.push_back(diffeo.apply(p.x));
  std::vector<CoveringRecord> records(xs.size());
  intersect_all(a, b, Mat::Identity(), 1.0, xs, shifted, opt.ladder, records, 0);
  PredictInputs in = base_inputs(a, &b, opt);
  Theorem th = Theorem::translation;
  if (opt.beta) {
    th = Theorem::fourier;
    in.beta = *opt.beta;
  }
  return finalize("intersect-translate", opt.ladder, std::move(records), predict(th, in), opt.tolerance, opt.margin);
}

ExperimentResult rotation_experiment(const Construction& a, const Construction& b, std::span<const Mat> rotations,
                                     std::span<const WeightedPoint> xs, const ExperimentOptions& opt) {
  check_compatible(a, b);
  if (a.grid().dim() < 2) throw InvalidArgument("rotation experiment needs d >= 2");
  check_ladder(opt.ladder, a.grid().k());
  if (rotations.empty()) throw InvalidArgument("no rotations");
  check_samples(rotations.size() * xs.size());
  const std::vector<Vec> pos = positions(xs);
  std::vector<CoveringRecord> records(rotations.size() * xs.size());
  for (std::size_t r = 0; r < rotations.size(); ++r) {
    std::span<CoveringRecord> block(records.data() + r * xs.size(), xs.size());
    intersect_all(a, b, rotations[r], 1.0, xs, pos, opt.ladder, block, r * xs.size());
    for (CoveringRecord& rec : block) rec.g = rotations[r];
  }
  return finalize("intersect-rotate", opt.ladder, std::move(records),
                  predict(Theorem::rotation, base_inputs(a, &b, opt)), opt.tolerance, opt.margin);
}

ExperimentResult dilation_experiment(const Construction& a, const Construction& b, std::span<const double> t_grid,
                                     double h, std::span<const WeightedPoint> xs, const ExperimentOptions& opt) {
  check_compatible(a, b);
  check_ladder(opt.ladder, a.grid().k());
  if (t_grid.empty()) throw InvalidArgument("empty t grid");
  for (double t : t_grid) {
    if (!(t >= 1.0 && t <= 2.0)) throw InvalidArgument(fmt::format("dilation {} outside [1, 2]", t));
  }
  check_samples(t_grid.size() * xs.size());
  const std::vector<Vec> pos = positions(xs);
  std::vector<CoveringRecord> records(t_grid.size() * xs.size());
  for (std::size_t r = 0; r < t_grid.size(); ++r) {
    std::span<CoveringRecord> block(records.data() + r * xs.size(), xs.size());
    intersect_all(a, b, t_grid[r] * Mat::Identity(), t_grid[r], xs, pos, opt.ladder, block, r * xs.size());
  }
  PredictInputs in = base_inputs(a, &b, opt);
  in.h = h;
  return finalize("intersect-dilate", opt.ladder, std::move(records), predict(Theorem::dilation, in), opt.tolerance,
                  opt.margin);
}

namespace {

void require_curvature(const DefiningFunction& phi, double t) {
  const double det = phong_stein_det(phi, sample_level_set(phi, t, 100));
  if (det < 1e-6) {
    throw InvalidArgument(fmt::format("rotational curvature determinant {:.3g} below 1e-6 for {} at t = {}", det,
                                      to_string(phi.family), t));
  }
}

}  // namespace

ExperimentResult level_set_experiment(const Construction& a, const MapSpec& phi, std::span<const WeightedPoint> xs,
                                      const ExperimentOptions& opt) {
  if (phi.phi.empty() || phi.level.empty()) throw InvalidArgument("level set needs one defining function");
  check_ladder(opt.ladder, a.grid().k());
  check_samples(xs.size());
  require_curvature(phi.phi[0], phi.level[0]);
  const LevelSetIndex index(a);
  std::vector<CoveringRecord> records(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) {
    const Vec x = xs[i].x;
    const CellSet fine = index.cells(std::span(phi.phi.data(), 1), std::span(&x, 1), std::span(phi.level.data(), 1));
    records[i] = make_record(i, xs[i], fine, opt.ladder);
    records[i].t = phi.level[0];
  });
  return finalize("levelset", opt.ladder, std::move(records), predict(Theorem::level_set, base_inputs(a, nullptr, opt)),
                  opt.tolerance, opt.margin);
}

ExperimentResult two_surface_experiment(const Construction& a, const MapSpec& phi, std::span<const WeightedPoint> xs1,
                                        std::span<const WeightedPoint> xs2, const ExperimentOptions& opt) {
  if (phi.phi.size() != 2 || phi.level.size() != 2) throw InvalidArgument("two equations need two defining functions");
  if (xs1.size() != xs2.size()) throw InvalidArgument("sample lists differ in length");
  check_ladder(opt.ladder, a.grid().k());
  check_samples(xs1.size());
  for (int l = 0; l < 2; ++l) require_curvature(phi.phi[l], phi.level[l]);
  const LevelSetIndex index(a);
  std::vector<CoveringRecord> records(xs1.size());
  std::vector<std::optional<Vec>> witness(xs1.size());
  parallel_for(xs1.size(), [&](std::size_t i) {
    const Vec x[2] = {xs1[i].x, xs2[i].x};
    const CellSet fine = index.cells(phi.phi, x, phi.level);
    WeightedPoint p{xs1[i].x, xs1[i].weight * xs2[i].weight};
    records[i] = make_record(i, p, fine, opt.ladder);
    records[i].x2 = xs2[i].x;
    records[i].t = phi.level[0];
    if (!fine.empty()) witness[i] = fine.center(fine.size() / 2) - a.origin;
  });
  std::vector<LevelPair> pairs;
  std::vector<Vec> x2;
  for (std::size_t i = 0; i < witness.size() && pairs.size() < 100; ++i) {
    if (!witness[i]) continue;
    pairs.push_back({xs1[i].x, *witness[i]});
    x2.push_back(xs2[i].x);
  }
  if (!pairs.empty()) {
    const double indep = gradient_independence(phi.phi[0], phi.phi[1], pairs, x2);
    if (indep < 1e-6) throw InvalidArgument(fmt::format("gradients of the two equations are dependent ({:.3g})", indep));
  }
  const bool spheres = phi.phi[0].family == Family::euclidean_distance && phi.phi[1].family == Family::euclidean_distance;
  return finalize("two-surface", opt.ladder, std::move(records),
                  predict(spheres ? Theorem::two_spheres : Theorem::two_equation, base_inputs(a, nullptr, opt)),
                  opt.tolerance, opt.margin);
}

ExperimentResult maximal_experiment(const Construction& a, const MapSpec& phi, std::span<const double> t_grid,
                                    std::span<const WeightedPoint> xs, const ExperimentOptions& opt) {
  if (phi.phi.empty()) throw InvalidArgument("maximal experiment needs one defining function");
  if (t_grid.empty()) throw InvalidArgument("empty t grid");
  check_ladder(opt.ladder, a.grid().k());
  check_samples(xs.size());
  for (double t : t_grid) require_curvature(phi.phi[0], t);
  const LevelSetIndex index(a);
  std::vector<CoveringRecord> records(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) {
    const Vec x = xs[i].x;
    CoveringRecord best;
    for (double t : t_grid) {
      const CellSet fine = index.cells(std::span(phi.phi.data(), 1), std::span(&x, 1), std::span(&t, 1));
      const std::vector<std::int64_t> counts = covering_counts(fine, opt.ladder);
      if (best.counts.empty()) {
        best.counts = counts;
        best.t = t;
      } else {
        if (counts.back() > best.counts.back()) best.t = t;
        for (std::size_t j = 0; j < counts.size(); ++j) best.counts[j] = std::max(best.counts[j], counts[j]);
      }
    }
    best.index = i;
    best.x = x;
    best.weight = xs[i].weight;
    best.gamma = ladder_slope(best.counts, opt.ladder);
    records[i] = std::move(best);
  });
  return finalize("maximal", opt.ladder, std::move(records), predict(Theorem::maximal, base_inputs(a, nullptr, opt)),
                  opt.tolerance, opt.margin);
}

ExceptionalReport exceptional_set_dim(std::span<const CoveringRecord> records, const PsiGrid& grid, double threshold,
                                      std::optional<double> predicted) {
  const int n = grid.per_axis;
  if (n < 16 || (n & (n - 1)) != 0) throw InvalidArgument("exceptional set needs a power-of-two x grid with at least 16 points per axis");
  const int jx = std::countr_zero(static_cast<unsigned>(n));
  std::size_t total = 1;
  for (int a = 0; a < grid.dim; ++a) total *= static_cast<std::size_t>(n);
  if (records.size() != total) throw InvalidArgument("records do not cover the x grid");
  const GridSpec g = make_grid(grid.dim, jx);
  std::vector<Coord> coords;
  for (std::size_t i = 0; i < total; ++i) {
    if (!(records[i].gamma > threshold)) continue;
    Coord c{0, 0, 0};
    std::size_t rest = i;
    for (int a = grid.dim - 1; a >= 0; --a) {
      c[a] = static_cast<std::int64_t>(rest % static_cast<std::size_t>(n));
      rest /= static_cast<std::size_t>(n);
    }
    coords.push_back(c);
  }
  ExceptionalReport rep;
  rep.cells = CellSet::from_coords(g, coords);
  rep.empty = rep.cells.empty();
  rep.threshold = threshold;
  rep.predicted = predicted;
  if (!rep.empty) rep.fit = minkowski_dim(rep.cells, jx - 4, jx);
  return rep;
}

InverseReport inverse_experiment(const Construction& e, const DefiningFunction& phi, std::span<const Vec> u,
                                 int t_count, std::span<const int> ladder, double gamma_target) {
  if (u.empty()) throw InvalidArgument("no sample points in U");
  if (t_count < 1) throw InvalidArgument("t grid needs at least one value");
  const int d = e.grid().dim();
  if (d < 2) throw InvalidArgument("inverse bound needs d >= 2");
  check_ladder(ladder, e.grid().k());
  const LevelSetIndex index(e);
  const double eps = e.grid().cell_side();
  InverseReport rep;
  rep.directions.assign(u.begin(), u.end());
  rep.gamma.assign(u.size(), kNegInf);
  rep.best_t.assign(u.size(), 0.0);
  parallel_for(u.size(), [&](std::size_t i) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t c = 0; c < e.cells().size(); ++c) {
      const double v = phi.value(u[i], e.cells().center(c) - e.origin);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    for (int s = 0; s < t_count; ++s) {
      const double t = lo + (s + 0.5) / t_count * (hi - lo);
      if (std::abs(t) < eps) continue;
      const CellSet fine = index.cells(std::span(&phi, 1), std::span(&u[i], 1), std::span(&t, 1));
      const double g = ladder_slope(covering_counts(fine, ladder), ladder);
      if (g > rep.gamma[i]) {
        rep.gamma[i] = g;
        rep.best_t[i] = t;
      }
    }
  });
  rep.witness = static_cast<std::size_t>(std::min_element(rep.gamma.begin(), rep.gamma.end()) - rep.gamma.begin());
  rep.gamma_uniform = rep.gamma[rep.witness];
  rep.bound = d * rep.gamma_uniform / (d - 1);
  rep.dimension = minkowski_dim(e.cells(), ladder.front(), ladder.back());
  rep.gamma_target = gamma_target;
  rep.target_met = rep.gamma_uniform >= gamma_target;
  const double dim = rep.dimension.slope;
  rep.consistent = rep.bound <= dim + 0.1 && (!rep.target_met || dim >= d * gamma_target / (d - 1) - 0.1);
  return rep;
}

}  // namespace fractint
