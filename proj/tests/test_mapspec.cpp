#include <doctest.h>

#include <cmath>

#include "fractint/mapspec.hpp"
#include "fractint/predict.hpp"

using namespace fractint;

namespace {

DefiningFunction fam(Family f, int dim, int m = 4) {
  DefiningFunction phi;
  phi.family = f;
  phi.dim = dim;
  phi.m = m;
  return phi;
}

}  // namespace

TEST_CASE("closed-form gradients match finite differences") {
  for (int d : {2, 3}) {
    for (Family f : {Family::euclidean_distance, Family::dot_product, Family::lm_norm, Family::paraboloid_offset,
                     Family::custom_polynomial}) {
      DefiningFunction phi = fam(f, d);
      if (f == Family::custom_polynomial) {
        phi.q << 1, 2, 0, -1, 3, 1, 0, 1, 2;
        phi.a = Vec(0.5, -1, 2);
        phi.b = Vec(1, 0.25, -0.5);
      }
      INFO(to_string(f) << " d=" << d);
      CHECK(gradient_check(phi) < 1e-6);
    }
  }
}

TEST_CASE("family names round trip") {
  for (Family f : {Family::euclidean_distance, Family::dot_product, Family::lm_norm, Family::paraboloid_offset,
                   Family::custom_polynomial}) {
    CHECK(family_from_string(to_string(f)) == f);
  }
  CHECK_THROWS_AS(family_from_string("cosine"), InvalidArgument);
}

TEST_CASE("level set samples lie on the level set") {
  const DefiningFunction phi = fam(Family::euclidean_distance, 3);
  const auto pairs = sample_level_set(phi, 1.0, 100);
  REQUIRE(pairs.size() == 100);
  for (const LevelPair& p : pairs) CHECK(phi.value(p.x, p.y) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sample_level_set(fam(Family::euclidean_distance, 2), 10.0, 10).empty());
}

TEST_CASE("rotational curvature of the distance function") {
  for (int d : {2, 3}) {
    const DefiningFunction phi = fam(Family::euclidean_distance, d);
    for (double t : {0.5, 1.0, 2.0}) {
      const auto pairs = sample_level_set(phi, t, 100);
      CHECK(phong_stein_det(phi, pairs) == doctest::Approx(std::pow(t, -(d - 1))).epsilon(1e-9));
    }
  }
}

TEST_CASE("rotational curvature of the dot product") {
  const DefiningFunction phi = fam(Family::dot_product, 2);
  const auto pairs = sample_level_set(phi, 1.0, 100);
  CHECK(phong_stein_det(phi, pairs) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(phong_stein_det(phi, {}), InvalidArgument);
}

TEST_CASE("the l^4 norm degenerates near the axes") {
  const DefiningFunction phi = fam(Family::lm_norm, 2, 4);
  const Vec x(0.5, 0.5, 0);
  const LevelPair axis{x, x + Vec(1.0, 0.0, 0)};
  CHECK(phong_stein_det(phi, {axis}) < 1e-12);
  const LevelPair diag{x, x + Vec(1.0, 1.0, 0) / std::pow(2.0, 0.25)};
  CHECK(phong_stein_det(phi, {diag}) > 0.1);
}

TEST_CASE("two distance functions have independent gradients") {
  const DefiningFunction phi = fam(Family::euclidean_distance, 3);
  const auto pairs = sample_level_set(phi, 1.0, 50);
  std::vector<Vec> x2;
  for (const LevelPair& p : pairs) x2.push_back(p.x + Vec(0.3, -0.2, 0.1));
  CHECK(gradient_independence(phi, phi, pairs, x2) > 1e-3);
  std::vector<Vec> same;
  for (const LevelPair& p : pairs) same.push_back(p.x);
  CHECK(gradient_independence(phi, phi, pairs, same) < 1e-12);
}

TEST_CASE("predict table") {
  struct Row {
    Theorem th;
    PredictInputs in;
    double intersection;
    double exceptional;  // NaN when absent
    bool holds;
  };
  const double none = std::nan("");
  auto in = [](int d, double sa, double sb, double alpha) {
    PredictInputs p;
    p.d = d;
    p.s_a = sa;
    p.s_b = sb;
    p.alpha = alpha;
    return p;
  };
  std::vector<Row> rows;
  rows.push_back({Theorem::mattila, in(3, 2, 2, 0), 1.0, none, false});
  rows.push_back({Theorem::translation, in(2, 1.5, 1.5, 0), 1.0, none, true});
  rows.push_back({Theorem::rotation, in(2, 1.5, 1.0, 2.0), 0.5, 1.5, true});
  {
    PredictInputs p = in(2, 1.5, 1.0, 2.0);
    p.beta = 1.0;
    rows.push_back({Theorem::fourier, p, 0.5, 1.5, true});
  }
  {
    PredictInputs p = in(2, 1.5, 1.0, 2.0);
    p.h = 0.0;
    rows.push_back({Theorem::dilation, p, 0.5, 0.5, true});
  }
  {
    PredictInputs p = in(3, 2.5, 0, 3.0);
    p.m = 1;
    p.sobolev = 1.0;
    rows.push_back({Theorem::operator_bound, p, 1.5, 1.5, true});
  }
  rows.push_back({Theorem::level_set, in(2, 1.8, 0, 2.0), 0.8, 1.2, true});
  rows.push_back({Theorem::maximal, in(3, 2.5, 0, 3.0), 1.5, 2.5, true});
  {
    PredictInputs p = in(3, 3.0, 0, 3.0);
    p.alpha2 = 3.0;
    rows.push_back({Theorem::two_spheres, p, 1.0, none, true});
  }
  rows.push_back({Theorem::rotation, in(2, 1.5, 1.0, 1.0), 0.5, 1.5, false});
  for (const Row& r : rows) {
    const Thresholds t = predict(r.th, r.in);
    INFO(to_string(r.th));
    CHECK(t.intersection == doctest::Approx(r.intersection).epsilon(1e-12));
    CHECK(t.exceptional.has_value() == !std::isnan(r.exceptional));
    if (t.exceptional) CHECK(*t.exceptional == doctest::Approx(r.exceptional).epsilon(1e-12));
    CHECK(t.hypotheses_hold == r.holds);
    CHECK(t.violations.empty() == r.holds);
  }
}

TEST_CASE("inverse and lattice predictions") {
  PredictInputs p;
  p.d = 2;
  p.gamma = 0.5;
  CHECK(*predict(Theorem::inverse, p).lower_bound == doctest::Approx(1.0));
  for (int d : {2, 3}) {
    p.d = d;
    p.s = (d + 1) / 2.0;
    const Thresholds t = predict(Theorem::number_theory, p);
    CHECK(*t.count_exponent == doctest::Approx(d - 4 + 4.0 / (d + 1)));
    CHECK_FALSE(t.hypotheses_hold);
  }
  p.d = 2;
  p.s = 1.6;
  const Thresholds t = predict(Theorem::number_theory, p);
  CHECK(*t.count_exponent == doctest::Approx(-0.5));
  CHECK(t.hypotheses_hold);
}

TEST_CASE("theorem names round trip") {
  for (Theorem t : {Theorem::mattila, Theorem::translation, Theorem::rotation, Theorem::fourier, Theorem::dilation,
                    Theorem::operator_bound, Theorem::level_set, Theorem::maximal, Theorem::two_equation,
                    Theorem::two_spheres, Theorem::inverse, Theorem::number_theory}) {
    CHECK(theorem_from_string(to_string(t)) == t);
  }
}
