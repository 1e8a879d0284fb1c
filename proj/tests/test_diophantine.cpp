#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "fractint/diophantine.hpp"
#include "fractint/rng.hpp"

using namespace fractint;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string csv(const CountTable& t) {
  std::ostringstream out;
  write_csv(out, t);
  return out.str();
}

LatticeConfig golden_config() { return make_lattice_config(2, 8, 1.5, Family::euclidean_distance, 4, 8.0); }

}  // namespace

TEST_CASE("tolerance follows q and s") {
  CHECK(golden_config().delta() == doctest::Approx(0.5));
  const LatticeConfig c = make_lattice_config(2, 64, 1.6);
  CHECK(c.delta() == doctest::Approx(std::pow(64.0, -0.25)));
  CHECK(c.lambda1 == doctest::Approx(0.75 * 64 * std::sqrt(2.0)));
  CHECK_THROWS_AS(make_lattice_config(2, 8, 2.5), InvalidArgument);
  CHECK_THROWS_AS(make_lattice_config(2, 8, 1.6, Family::euclidean_distance, 4, 3.0), InvalidArgument);
  CHECK_THROWS_AS(make_lattice_config(2, 8, 1.6, Family::dot_product), InvalidArgument);
  CHECK_THROWS_AS(make_lattice_config(4, 8, 1.6), InvalidArgument);
}

TEST_CASE("exhaustive q=8 table matches the golden file") {
  const std::string golden = slurp(FRACTINT_GOLDEN_DIR "/count_d2_q8.csv");
  REQUIRE_FALSE(golden.empty());
  const CountTable brute = count_bruteforce(golden_config(), PairSpec{});
  const CountTable fast = count_fast(golden_config(), PairSpec{});
  CHECK(csv(brute) == golden);
  CHECK(csv(fast) == golden);
  CHECK(brute.pairs.size() == 81 * 81);
  CHECK(brute.aggregate == doctest::Approx(brute.mean * std::pow(9.0 / 8.0, 4)));
  const LatticePair corner{LatticePoint{0, 0, 0}, LatticePoint{8, 8, 0}};
  CHECK(count_bruteforce(golden_config(), std::span(&corner, 1)).nu[0] == 2);
}

TEST_CASE("fast counts equal brute force on the exhaustive q=16 table") {
  const LatticeConfig cfg = make_lattice_config(2, 16, 1.5);
  const CountTable a = count_bruteforce(cfg, PairSpec{});
  const CountTable b = count_fast(cfg, PairSpec{});
  CHECK(a.nu == b.nu);
  CHECK(a.aggregate == b.aggregate);
}

TEST_CASE("fast counts equal brute force on sampled pairs") {
  for (int q : {32, 64}) {
    for (Family f : {Family::euclidean_distance, Family::lm_norm}) {
      const LatticeConfig cfg = make_lattice_config(2, q, 1.6, f);
      PairSpec spec;
      spec.mode = PairMode::sampled;
      spec.n_pairs = 1024;
      spec.seed = 11;
      CHECK(count_bruteforce(cfg, spec).nu == count_fast(cfg, spec).nu);
    }
  }
  const LatticeConfig c3 = make_lattice_config(3, 12, 2.5);
  PairSpec spec;
  spec.mode = PairMode::sampled;
  spec.n_pairs = 256;
  CHECK(count_bruteforce(c3, spec).nu == count_fast(c3, spec).nu);
}

TEST_CASE("zero distance forces n = n1 = n2") {
  LatticeConfig cfg = make_lattice_config(2, 4, 1.6);
  cfg.lambda1 = cfg.lambda2 = 0.0;
  cfg.delta_override = 0.5;
  const CountTable t = count_fast(cfg, PairSpec{});
  for (std::size_t i = 0; i < t.pairs.size(); ++i) CHECK(t.nu[i] == (t.pairs[i][0] == t.pairs[i][1] ? 1 : 0));
  CHECK(count_bruteforce(cfg, PairSpec{}).nu == t.nu);
}

TEST_CASE("vacuous and empty constraints") {
  LatticeConfig cfg = make_lattice_config(2, 6, 1.6);
  cfg.lambda1 = cfg.lambda2 = 0.0;
  cfg.delta_override = 100.0;
  for (std::int64_t v : count_fast(cfg, PairSpec{}).nu) CHECK(v == 49);
  LatticeConfig far = make_lattice_config(2, 6, 1.6);
  far.lambda1 = 60.0;
  const CountTable t = count_fast(far, PairSpec{});
  CHECK(t.mean == 0.0);
  CHECK(count_bruteforce(far, PairSpec{}).nu == t.nu);
}

TEST_CASE("single equation counts an annulus") {
  LatticeConfig cfg = make_lattice_config(2, 128, 1.6, Family::euclidean_distance, 4, 64.0);
  cfg.single_equation = true;
  cfg.lambda1 = 61.7;
  const LatticePair center{LatticePoint{64, 64, 0}, LatticePoint{0, 0, 0}};
  const std::int64_t n = count_fast(cfg, std::span(&center, 1)).nu[0];
  CHECK(n == 184);
  CHECK(count_bruteforce(cfg, std::span(&center, 1)).nu[0] == n);
  const double area = 4 * M_PI * cfg.lambda1 * cfg.delta();
  CHECK(std::abs(n - area) <= 4 * std::pow(cfg.lambda1, 2.0 / 3.0));
}

TEST_CASE("counts are invariant under box symmetries") {
  for (Family f : {Family::euclidean_distance, Family::lm_norm}) {
    const int q = 24;
    const LatticeConfig cfg = make_lattice_config(2, q, 1.7, f);
    const std::vector<LatticePair> pairs = make_pairs(2, q, PairSpec{PairMode::sampled, 512, 5});
    const CountTable base = count_fast(cfg, pairs);
    const auto swap = [](LatticePoint p) { return LatticePoint{p[1], p[0], 0}; };
    const auto flip = [q](LatticePoint p) { return LatticePoint{q - p[0], p[1], 0}; };
    std::vector<LatticePair> swapped, flipped;
    for (const LatticePair& p : pairs) {
      swapped.push_back({swap(p[0]), swap(p[1])});
      flipped.push_back({flip(p[0]), flip(p[1])});
    }
    CHECK(count_fast(cfg, swapped).nu == base.nu);
    CHECK(count_fast(cfg, flipped).nu == base.nu);
  }
}

TEST_CASE("enlarging the tolerance never lowers a count") {
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const int q = 4 + static_cast<int>(rng.below(13));
    LatticeConfig cfg = make_lattice_config(2, q, rng.uniform(1.55, 1.95), Family::euclidean_distance, 4,
                                            rng.uniform(0.5, 2.0) * q);
    const std::vector<LatticePair> pairs = make_pairs(2, q, PairSpec{PairMode::sampled, 64, rng.next()});
    const double d1 = cfg.delta();
    cfg.delta_override = d1 * rng.uniform(1.0, 3.0);
    const CountTable wide = count_fast(cfg, pairs);
    cfg.delta_override = d1;
    const CountTable narrow = count_fast(cfg, pairs);
    for (std::size_t i = 0; i < pairs.size(); ++i) CHECK(narrow.nu[i] <= wide.nu[i]);
  }
}

TEST_CASE("sampled estimate is stable when the sample doubles") {
  const LatticeConfig cfg = make_lattice_config(2, 32, 1.6);
  const CountTable a = count_fast(cfg, PairSpec{PairMode::sampled, 4096, 2});
  const CountTable b = count_fast(cfg, PairSpec{PairMode::sampled, 8192, 3});
  CHECK(a.stderr_aggregate > 0.0);
  CHECK(std::abs(a.aggregate - b.aggregate) <= 3 * std::hypot(a.stderr_aggregate, b.stderr_aggregate));
}

TEST_CASE("budget and argument errors") {
  CHECK_THROWS_AS(count_bruteforce(make_lattice_config(2, 31, 1.6), PairSpec{}), BudgetError);
  CHECK_THROWS_AS(make_pairs(2, 8, PairSpec{PairMode::sampled, 0, 1}), InvalidArgument);
  const LatticePair outside{LatticePoint{9, 0, 0}, LatticePoint{0, 0, 0}};
  CHECK_THROWS_AS(count_fast(golden_config(), std::span(&outside, 1)), InvalidArgument);
  const std::vector<int> short_list{8, 16, 32};
  const std::vector<int> narrow{8, 10, 12, 16};
  const std::vector<int> ok{8, 16, 32, 64};
  PairSpec spec{PairMode::sampled, 64, 1};
  CHECK_THROWS_AS(average_slope(2, 1.6, short_list, spec), InvalidArgument);
  CHECK_THROWS_AS(average_slope(2, 1.6, narrow, spec), InvalidArgument);
  CHECK_THROWS_AS(average_slope(2, 1.5, ok, spec), InvalidArgument);
}

TEST_CASE("average count exponent at s = 1.6") {
  const std::vector<int> qs{8, 16, 32, 64};
  const AverageSlope r = average_slope(2, 1.6, qs, PairSpec{PairMode::sampled, 4096, 1});
  CHECK(r.predicted == doctest::Approx(-0.5));
  CHECK(r.fit.slope <= r.predicted + r.tolerance);
  CHECK(r.respected);
}
