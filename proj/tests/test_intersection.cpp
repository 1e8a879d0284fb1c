#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "fractint/intersection.hpp"
#include "fractint/transform.hpp"

using namespace fractint;

namespace {

Descriptor shape(Kind kind, int d, int k) {
  Descriptor s;
  s.kind = kind;
  s.d = d;
  s.k = k;
  return s;
}

Construction interval_times_cantor(int k) {
  Descriptor c;
  c.kind = Kind::cantor;
  c.p = 2;
  c.n = k / 2;
  Descriptor seg;
  seg.kind = Kind::box;
  seg.d = 1;
  Descriptor p;
  p.kind = Kind::product;
  p.d = 2;
  p.k = k;
  p.factors = {seg, c};
  return build(p);
}

Construction segment(int k, const Vec& normal) {
  Descriptor s = shape(Kind::hyperplane_patch, 2, k);
  s.normal = normal;
  return build(s);
}

std::vector<int> ladder(int lo, int hi) {
  std::vector<int> v;
  for (int j = lo; j <= hi; ++j) v.push_back(j);
  return v;
}

// Largest gap between the empirical CDF of the values and the uniform CDF on
// [lo, hi].
double ks_uniform(std::vector<double> v, double lo, double hi) {
  std::sort(v.begin(), v.end());
  double worst = 0.0;
  const double n = static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = (v[i] - lo) / (hi - lo);
    worst = std::max({worst, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
  }
  return worst;
}

}  // namespace

TEST_CASE("overlapping full squares") {
  const Construction sq = build(shape(Kind::box, 2, 8));
  CHECK(covering_number(sq, sq, Mat::Identity(), Vec(1, 1, 0), 4) == 256);
  CHECK(covering_number(sq, sq, Mat::Identity(), Vec(0.5, 0.75, 0), 4) == 96);
  CHECK(covering_number(sq, sq, Mat::Identity(), Vec(0.5, 0.75, 0), 8) == 128 * 192);
  // contact along a corner only has no interior cells
  CHECK(covering_number(sq, sq, Mat::Identity(), Vec::Zero(), 4) == 0);
}

TEST_CASE("transversal segments meet in a bounded number of cells") {
  const Construction v = segment(9, Vec::UnitX());
  const Construction h = segment(9, Vec::UnitY());
  for (int j = 2; j <= 9; ++j) {
    const std::int64_t n = covering_number(v, h, Mat::Identity(), Vec(0.3, 0.2, 0), j);
    CHECK(n >= 1);
    CHECK(n <= 9);
  }
}

TEST_CASE("two circles meet in two small clusters") {
  const Construction c = build(shape(Kind::sphere, 2, 9));
  for (int j = 2; j <= 8; ++j) {
    const std::int64_t n = covering_number(c, c, Mat::Identity(), Vec(0.5, 0.0, 0), j);
    CHECK(n >= 2);
    CHECK(n <= 16);
  }
}

TEST_CASE("incompatible grids are rejected") {
  const Construction a = build(shape(Kind::box, 2, 6));
  const Construction b = build(shape(Kind::box, 2, 7));
  CHECK_THROWS_AS(covering_number(a, b, Mat::Identity(), Vec::Zero(), 3), InvalidArgument);
}

TEST_CASE("psi weights form a normalized tent") {
  PsiGrid g;
  g.per_axis = 4;
  const auto xs = psi_samples(g);
  REQUIRE(xs.size() == 16);
  double total = 0.0;
  for (const auto& p : xs) total += p.weight;
  CHECK(total == doctest::Approx(1.0));
  CHECK(xs[5].weight > xs[0].weight);
  CHECK(xs[1].x[1] == doctest::Approx(0.375));
  CHECK(xs[4].x[0] == doctest::Approx(0.375));
}

TEST_CASE("Haar samples on O(2) and O(3)") {
  for (int d : {2, 3}) {
    const auto gs = haar_sample(d, 4000, 3);
    std::vector<double> v;
    int reflections = 0;
    for (const Mat& g : gs) {
      const auto b = g.topLeftCorner(d, d);
      CHECK((b * b.transpose() - Eigen::MatrixXd::Identity(d, d)).norm() < 1e-12);
      if (b.determinant() < 0) ++reflections;
      // first column: uniform angle on the circle, uniform height on the sphere
      v.push_back(d == 2 ? std::atan2(g(1, 0), g(0, 0)) : g(2, 0));
    }
    const double lo = d == 2 ? -M_PI : -1.0, hi = d == 2 ? M_PI : 1.0;
    // 1% critical value of the Kolmogorov statistic at n = 4000
    CHECK(ks_uniform(v, lo, hi) < 1.63 / std::sqrt(4000.0));
    CHECK(std::abs(reflections - 2000) < 3 * std::sqrt(1000.0));
  }
  CHECK_THROWS_AS(haar_sample(1, 4, 1), InvalidArgument);
}

TEST_CASE("full boxes give slope d") {
  const Construction sq = build(shape(Kind::box, 2, 9));
  ExperimentOptions opt;
  opt.ladder = ladder(3, 7);
  const auto xs = psi_samples(overlap_region(sq, sq, 8));
  const ExperimentResult r = translation_experiment(sq, sq, Transform::identity(2), xs, opt);
  CHECK(std::abs(r.fit.slope - 2.0) < 0.05);
  CHECK(r.verdict == Verdict::respected);
}

TEST_CASE("identity rotation and unit dilation reproduce translation") {
  const Construction a = interval_times_cantor(8);
  Descriptor cd = shape(Kind::sphere, 2, 8);
  const Construction b = build(cd);
  ExperimentOptions opt;
  opt.ladder = ladder(2, 6);
  opt.alpha = 2.0;
  const auto xs = psi_samples(overlap_region(a, b, 8));
  const ExperimentResult tr = translation_experiment(a, b, Transform::identity(2), xs, opt);
  const std::vector<Mat> id{Mat::Identity()};
  const ExperimentResult ro = rotation_experiment(a, b, id, xs, opt);
  const std::vector<double> one{1.0};
  const ExperimentResult di = dilation_experiment(a, b, one, 0.0, xs, opt);
  REQUIRE(tr.records.size() == ro.records.size());
  REQUIRE(tr.records.size() == di.records.size());
  for (std::size_t i = 0; i < tr.records.size(); ++i) {
    CHECK(tr.records[i].counts == ro.records[i].counts);
    CHECK(tr.records[i].counts == di.records[i].counts);
    CHECK(tr.records[i].gamma == ro.records[i].gamma);
  }
  CHECK(tr.averaged_counts == ro.averaged_counts);
}

TEST_CASE("counts grow by at most 2^d per level") {
  const Construction a = interval_times_cantor(8);
  const Construction b = build(shape(Kind::sphere, 2, 8));
  ExperimentOptions opt;
  opt.ladder = ladder(2, 8);
  const auto gs = haar_sample(2, 8, 5);
  const ExperimentResult r = rotation_experiment(a, b, gs, psi_samples(overlap_region(a, b, 4)), opt);
  for (const CoveringRecord& rec : r.records) {
    for (std::size_t i = 1; i < rec.counts.size(); ++i) CHECK(rec.counts[i] <= 4 * rec.counts[i - 1]);
    CHECK((rec.counts.back() == 0) == std::isinf(rec.gamma));
  }
}

TEST_CASE("verdict is a function of the records") {
  const Construction a = interval_times_cantor(8);
  const Construction b = build(shape(Kind::sphere, 2, 8));
  ExperimentOptions opt;
  opt.ladder = ladder(2, 6);
  const std::vector<double> ts{1.0, 1.25, 1.5, 1.75, 2.0};
  const ExperimentResult r = dilation_experiment(a, b, ts, 0.0, psi_samples(overlap_region(a, b, 4)), opt);
  const ExperimentResult again = finalize(r.experiment, r.ladder, r.records, r.threshold, r.tolerance, r.margin);
  CHECK(again.fit.slope == r.fit.slope);
  CHECK(again.verdict == r.verdict);
  CHECK(again.exceptional_fraction == r.exceptional_fraction);
  CHECK(again.averaged_counts == r.averaged_counts);
}

TEST_CASE("experiment preconditions") {
  const Construction a = interval_times_cantor(8);
  const Construction b = build(shape(Kind::sphere, 2, 8));
  ExperimentOptions opt;
  opt.ladder = ladder(2, 6);
  const auto few = psi_samples(overlap_region(a, b, 4));
  CHECK_THROWS_AS(translation_experiment(a, b, Transform::identity(2), few, opt), InvalidArgument);
  const auto xs = psi_samples(overlap_region(a, b, 8));
  ExperimentOptions bad = opt;
  bad.ladder.clear();
  CHECK_THROWS_AS(translation_experiment(a, b, Transform::identity(2), xs, bad), InvalidArgument);
  bad.ladder = ladder(2, 9);
  CHECK_THROWS_AS(translation_experiment(a, b, Transform::identity(2), xs, bad), InvalidArgument);
  const std::vector<double> wide{0.5, 1.0};
  CHECK_THROWS_AS(dilation_experiment(a, b, wide, 0.0, xs, opt), InvalidArgument);
  const Construction l1 = build(shape(Kind::box, 1, 8));
  const std::vector<Mat> id{Mat::Identity()};
  CHECK_THROWS_AS(rotation_experiment(l1, l1, id, xs, opt), InvalidArgument);
}

TEST_CASE("degenerate dilation direction is flagged") {
  // B an axis segment in a hyperplane: h = s_B, so the hypothesis fails
  const Construction a = interval_times_cantor(8);
  const Construction b = segment(8, Vec::UnitY());
  ExperimentOptions opt;
  opt.ladder = ladder(2, 6);
  opt.alpha = 2.0;
  const std::vector<double> ts{1.0, 1.5, 2.0};
  const ExperimentResult r =
      dilation_experiment(a, b, ts, b.design_dimension, psi_samples(overlap_region(a, b, 8)), opt);
  CHECK_FALSE(r.threshold.hypotheses_hold);
  CHECK_FALSE(claims_violation(r));
}

TEST_CASE("hyperplane slice of the full square") {
  const Construction sq = build(shape(Kind::box, 2, 9));
  MapSpec dot;
  dot.phi[0].family = Family::dot_product;
  dot.phi[0].dim = 2;
  dot.level = {1.0};
  ExperimentOptions opt;
  opt.ladder = ladder(2, 7);
  opt.alpha = 2.0;
  PsiGrid g;
  g.lo = Vec(0.8, 0.8, 0);
  g.hi = Vec(1.2, 1.2, 0);
  const ExperimentResult r = level_set_experiment(sq, dot, psi_samples(g), opt);
  CHECK(std::abs(r.fit.slope - 1.0) < 0.05);
}

TEST_CASE("two spheres in the full cube meet in a circle") {
  const Construction cube = build(shape(Kind::box, 3, 8));
  MapSpec two;
  two.phi = {DefiningFunction{}, DefiningFunction{}};
  two.phi[0].dim = 3;
  two.phi[1].dim = 3;
  two.level = {0.75, 0.75};
  PsiGrid g1;
  g1.dim = 3;
  g1.lo = Vec(0.0, 0.4, 0.4);
  g1.hi = Vec(0.2, 0.6, 0.6);
  g1.per_axis = 4;
  PsiGrid g2 = g1;
  g2.lo[0] = 0.8;
  g2.hi[0] = 1.0;
  auto x2 = psi_samples(g2);
  std::reverse(x2.begin(), x2.end());
  ExperimentOptions opt;
  opt.ladder = ladder(2, 6);
  opt.alpha = opt.alpha2 = 3.0;
  const ExperimentResult r = two_surface_experiment(cube, two, psi_samples(g1), x2, opt);
  CHECK(r.threshold.theorem == Theorem::two_spheres);
  CHECK(std::abs(r.fit.slope - 1.0) < 0.1);
}

TEST_CASE("repeated equation degenerates to one equation") {
  const Construction a = interval_times_cantor(8);
  const LevelSetIndex index(a);
  DefiningFunction phi;
  phi.dim = 2;
  for (const Vec& x : {Vec(0.1, 0.2, 0), Vec(0.5, 0.5, 0), Vec(0.9, 0.3, 0)}) {
    const double t = 0.6;
    const DefiningFunction both[2] = {phi, phi};
    const Vec xs[2] = {x, x};
    const double ts[2] = {t, t};
    CHECK(index.cells(std::span(both), std::span(xs), std::span(ts)) ==
          index.cells(std::span(both, 1), std::span(xs, 1), std::span(ts, 1)));
  }
}

TEST_CASE("level set cells cover the exact level set") {
  const Construction sq = build(shape(Kind::box, 2, 8));
  const LevelSetIndex index(sq);
  DefiningFunction phi;
  phi.dim = 2;
  const Vec x(0.4, 0.3, 0);
  const double t = 0.5;
  const CellSet cells = index.cells(std::span(&phi, 1), std::span(&x, 1), std::span(&t, 1));
  for (int i = 0; i < 1000; ++i) {
    const double th = 2 * M_PI * i / 1000.0;
    const Vec y = x + t * Vec(std::cos(th), std::sin(th), 0);
    if (y[0] < 0 || y[0] >= 1 || y[1] < 0 || y[1] >= 1) continue;
    CHECK(cells.contains(sq.grid().locate(y)));
  }
}

TEST_CASE("single-value maximal reduces to the level set") {
  const Construction a = interval_times_cantor(8);
  MapSpec dist;
  dist.phi[0].dim = 2;
  dist.level = {0.5};
  ExperimentOptions opt;
  opt.ladder = ladder(2, 6);
  PsiGrid g;
  g.lo = Vec(0.25, 0.25, 0);
  g.hi = Vec(0.75, 0.75, 0);
  const auto xs = psi_samples(g);
  const ExperimentResult ls = level_set_experiment(a, dist, xs, opt);
  const std::vector<double> one{0.5};
  const ExperimentResult mx = maximal_experiment(a, dist, one, xs, opt);
  for (std::size_t i = 0; i < ls.records.size(); ++i) CHECK(ls.records[i].counts == mx.records[i].counts);
}

TEST_CASE("flat defining function fails the curvature check") {
  const Construction a = interval_times_cantor(8);
  MapSpec flat;
  flat.phi[0].family = Family::custom_polynomial;
  flat.phi[0].dim = 2;
  flat.phi[0].q = Mat::Zero();
  flat.phi[0].a = Vec(1, 0, 0);
  flat.phi[0].b = Vec(0, 1, 0);
  flat.level = {0.5};
  ExperimentOptions opt;
  opt.ladder = ladder(2, 6);
  PsiGrid g;
  CHECK_THROWS_AS(level_set_experiment(a, flat, psi_samples(g), opt), InvalidArgument);
}

TEST_CASE("exceptional set of synthetic records") {
  PsiGrid g;
  g.per_axis = 32;
  std::vector<CoveringRecord> recs(32 * 32);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const std::size_t row = i / 32, col = i % 32;
    recs[i].gamma = row == col ? 1.0 : 0.2;
  }
  const ExceptionalReport diag = exceptional_set_dim(recs, g, 0.5, 1.0);
  CHECK_FALSE(diag.empty);
  CHECK(diag.cells.size() == 32);
  CHECK(std::abs(diag.fit.slope - 1.0) < 0.01);
  const ExceptionalReport none = exceptional_set_dim(recs, g, 2.0);
  CHECK(none.empty);
  PsiGrid small;
  small.per_axis = 8;
  CHECK_THROWS_AS(exceptional_set_dim(std::span(recs.data(), 64), small, 0.5), InvalidArgument);
}

TEST_CASE("inverse bound on the full square") {
  const Construction sq = build(shape(Kind::box, 2, 9));
  DefiningFunction dot;
  dot.family = Family::dot_product;
  dot.dim = 2;
  std::vector<Vec> u;
  for (int i = 0; i < 8; ++i) u.push_back(Vec(std::cos(0.2 * i + 0.1), std::sin(0.2 * i + 0.1), 0));
  const InverseReport r = inverse_experiment(sq, dot, u, 8, ladder(2, 7), 1.0);
  CHECK(std::abs(r.gamma_uniform - 1.0) < 0.1);
  CHECK(std::abs(r.dimension.slope - 2.0) < 0.02);
  CHECK(r.consistent);
  CHECK_THROWS_AS(inverse_experiment(sq, dot, {}, 8, ladder(2, 7), 1.0), InvalidArgument);
}

TEST_CASE("generic translations of a circle rarely exceed the bound") {
  const Construction a = interval_times_cantor(10);
  const Construction b = build(shape(Kind::sphere, 2, 10));
  ExperimentOptions opt;
  opt.ladder = ladder(2, 8);
  opt.alpha = 2.0;
  const ExperimentResult r =
      translation_experiment(a, b, Transform::identity(2), psi_samples(overlap_region(a, b, 8)), opt);
  CHECK(r.threshold.intersection == doctest::Approx(0.5));
  CHECK(r.verdict == Verdict::respected);
}
