#include <doctest.h>

#include <sstream>

#include "fractint/grid.hpp"
#include "fractint/measure.hpp"
#include "fractint/rng.hpp"
#include "fractint/transform.hpp"

using namespace fractint;

namespace {

CellSet random_set(const GridSpec& g, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Coord> cs;
  for (std::size_t i = 0; i < n; ++i) {
    Coord c{0, 0, 0};
    for (int a = 0; a < g.dim(); ++a) c[a] = static_cast<std::int64_t>(rng.below(g.cells_per_axis()));
    cs.push_back(c);
  }
  return CellSet::from_coords(g, cs);
}

}  // namespace

TEST_CASE("grid sizes") {
  const GridSpec g = make_grid(2, 4);
  CHECK(g.cells_per_axis() == 16);
  CHECK(g.cell_side() == doctest::Approx(1.0 / 16));
  CHECK(make_grid(1, 0).cells_per_axis() == 1);
  const GridSpec g3 = make_grid(3, 10);
  CHECK(g3.cells_per_axis() == 1024);
  CellSet one = CellSet::from_coords(g3, std::vector<Coord>{{5, 6, 7}});
  CHECK(one.size() == 1);
  CHECK(one.coord(0) == Coord{5, 6, 7});
}

TEST_CASE("grid rejects bad parameters") {
  CHECK_THROWS_AS(make_grid(0, 3), InvalidArgument);
  CHECK_THROWS_AS(make_grid(4, 3), InvalidArgument);
  CHECK_THROWS_AS(make_grid(2, 3, 3), InvalidArgument);
  CHECK_THROWS_AS(make_grid(3, 22), InvalidArgument);
  CHECK_THROWS_AS(make_grid(2, -1), InvalidArgument);
  CHECK_NOTHROW(make_grid(2, 30, 2));
}

TEST_CASE("key order is lexicographic") {
  const GridSpec g = make_grid(3, 5);
  CellSet s = random_set(g, 500, 3);
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s.coord(i - 1) < s.coord(i));
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(g.encode(s.coord(i)) == s.key(i));
}

TEST_CASE("dilate examples") {
  const GridSpec g = make_grid(2, 4);
  CellSet one = CellSet::from_coords(g, std::vector<Coord>{{5, 5, 0}});
  CHECK(dilate(one, 1).size() == 9);
  const GridSpec g1 = make_grid(1, 5);
  std::vector<Coord> run;
  for (int i = 10; i < 15; ++i) run.push_back({i, 0, 0});
  CHECK(dilate(CellSet::from_coords(g1, run), 2).size() == 9);
  const CellSet full = CellSet::full(g);
  CHECK(dilate(full, 3) == full);
  CellSet corner = CellSet::from_coords(g, std::vector<Coord>{{0, 0, 0}});
  CHECK(dilate(corner, 1).size() == 4);
  CHECK(dilate(CellSet(g), 2).empty());
}

TEST_CASE("dilate matches brute force and composes") {
  for (int d = 1; d <= 3; ++d) {
    const GridSpec g = make_grid(d, 4);
    CellSet s = random_set(g, 20, 10 + d);
    for (int r = 0; r <= 2; ++r) {
      std::vector<Coord> brute;
      const CellSet full = CellSet::full(g);
      for (std::size_t i = 0; i < full.size(); ++i) {
        const Coord c = full.coord(i);
        for (std::size_t j = 0; j < s.size(); ++j) {
          const Coord e = s.coord(j);
          bool near = true;
          for (int a = 0; a < d; ++a) near = near && std::abs(c[a] - e[a]) <= r;
          if (near) {
            brute.push_back(c);
            break;
          }
        }
      }
      const CellSet dl = dilate(s, r);
      CHECK(dl == CellSet::from_coords(g, brute));
      CHECK(intersect(dl, s) == s);
    }
    CHECK(dilate(dilate(s, 1), 2) == dilate(s, 3));
  }
}

TEST_CASE("coarsen and refine") {
  const GridSpec g = make_grid(2, 6);
  CellSet s = random_set(g, 300, 5);
  const CellSet c = coarsen(s, 3);
  CHECK(c.grid().k() == 3);
  CHECK(c.size() <= s.size());
  const CellSet back = refine(c, 6);
  CHECK(intersect(back, s) == s);
  CHECK(coarsen(back, 3) == c);
  CHECK(coarsen(CellSet::full(g), 2).size() == 16);
  CHECK_THROWS_AS(coarsen(s, 7), InvalidArgument);
}

TEST_CASE("for_each_in_box visits exactly the box") {
  const GridSpec g = make_grid(3, 4);
  CellSet s = random_set(g, 800, 9);
  Coord lo{2, 3, 4}, hi{9, 7, 12};
  std::size_t hits = 0, expected = 0;
  for_each_in_box(s, lo, hi, [&](std::size_t) { ++hits; });
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Coord c = s.coord(i);
    bool in = true;
    for (int a = 0; a < 3; ++a) in = in && c[a] >= lo[a] && c[a] <= hi[a];
    expected += in;
  }
  CHECK(hits == expected);
}

TEST_CASE("text and binary round trip") {
  for (int d = 1; d <= 3; ++d) {
    const GridSpec g = make_grid(d, 7, 2);
    CellSet s = random_set(g, 200, 20 + d);
    std::stringstream text;
    write_text(text, s);
    CHECK(read_text(text) == s);
    std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
    write_binary(bin, s);
    CHECK(read_binary(bin) == s);
  }
  std::stringstream bad("FRCX");
  CHECK_THROWS_AS(read_binary(bad), FormatError);
  std::stringstream header("2 4 1 1\n");
  std::stringstream h2("2 4 1 1\n99 0\n");
  CHECK_THROWS_AS(read_text(header), FormatError);
  CHECK_THROWS_AS(read_text(h2), InvalidArgument);
}

TEST_CASE("uniform measure and ball mass") {
  const GridSpec g = make_grid(2, 4);
  const CellSet full = CellSet::full(g);
  const DiscreteMeasure mu = uniform_measure(full);
  CHECK(mu.weight(0) == 1.0 / 256);
  CHECK(ball_mass(mu, Vec(0.5, 0.5, 0), 10.0) == 1.0);
  CHECK_THROWS_AS(uniform_measure(CellSet(g)), InvalidArgument);
  CHECK_THROWS_AS(ball_mass(mu, Vec(0.5, 0.5, 0), 0.1), ScaleError);
  const GridSpec g1 = make_grid(1, 8);
  const DiscreteMeasure line = uniform_measure(CellSet::full(g1));
  CHECK(std::abs(ball_mass(line, Vec(0.5, 0, 0), 0.25) - 0.5) <= 1.0 / 256);
  const CellSet four = CellSet::from_coords(g, std::vector<Coord>{{0, 0, 0}, {1, 1, 0}, {2, 2, 0}, {3, 3, 0}});
  const DiscreteMeasure m4 = uniform_measure(four);
  for (double w : m4.weights()) CHECK(w == 0.25);
  CHECK(uniform_measure(CellSet::from_coords(g, std::vector<Coord>{{1, 2, 0}})).weight(0) == 1.0);
}

TEST_CASE("ahlfors check on the square") {
  const GridSpec g = make_grid(2, 6);
  const DiscreteMeasure mu = uniform_measure(CellSet::full(g));
  const std::vector<double> deltas{1.0 / 32, 1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2};
  const AhlforsReport good = ad_regularity_check(mu, 2.0, deltas, 8.0);
  CHECK(good.pass);
  CHECK(good.c_best <= 8.0);
  const AhlforsReport bad = ad_regularity_check(mu, 1.0, deltas, 8.0);
  CHECK_FALSE(bad.pass);
  CHECK_THROWS_AS(ad_regularity_check(mu, 2.0, std::vector<double>{}, 8.0), InvalidArgument);
}

TEST_CASE("transform identity, shift and rotation") {
  const GridSpec g = make_grid(2, 5);
  CellSet s = random_set(g, 100, 31);
  CHECK(transform(s, Transform::identity(2), g) == s);
  const double eps = g.cell_side();
  const CellSet moved = transform(s, Transform::translation(2, Vec(eps, 0, 0)), g);
  std::vector<Coord> shifted;
  for (std::size_t i = 0; i < s.size(); ++i) {
    Coord c = s.coord(i);
    c[0] += 1;
    if (c[0] < g.cells_per_axis()) shifted.push_back(c);
  }
  CHECK(moved == CellSet::from_coords(g, shifted));

  std::vector<Coord> box;
  for (int x = 4; x < 12; ++x)
    for (int y = 10; y < 14; ++y) box.push_back({x, y, 0});
  const CellSet b = CellSet::from_coords(g, box);
  Mat rot = Mat::Identity();
  rot << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  const CellSet r = transform(b, Transform::rotation(2, rot, Vec(0.5, 0.5, 0)), g);
  std::vector<Coord> expect;
  for (const Coord& c : box) expect.push_back({31 - c[1], c[0], 0});
  CHECK(r == CellSet::from_coords(g, expect));

  Mat bad = Mat::Identity();
  bad(0, 1) = 0.1;
  CHECK_THROWS_AS(Transform::rotation(2, bad), InvalidArgument);
  CHECK_THROWS_AS(Transform::polynomial(1, {{0.0, -1.0, 1.0}}, 1.0), InvalidArgument);
}

TEST_CASE("rotation round trip contains the original") {
  const GridSpec g = make_grid(2, 6);
  std::vector<Coord> disk;
  for (int x = 0; x < 64; ++x)
    for (int y = 0; y < 64; ++y)
      if ((x - 32) * (x - 32) + (y - 30) * (y - 30) < 100) disk.push_back({x, y, 0});
  const CellSet a = CellSet::from_coords(g, disk);
  const double th = 0.37;
  Mat rot = Mat::Identity();
  rot << std::cos(th), -std::sin(th), 0, std::sin(th), std::cos(th), 0, 0, 0, 1;
  const Transform t = Transform::rotation(2, rot, Vec(0.5, 0.5, 0));
  const CellSet back = transform(transform(a, t, g), t.inverse(), g);
  CHECK(intersect(back, a) == a);
  CHECK(intersect(back, dilate(a, 3)) == back);
}

TEST_CASE("transform_into agrees with the forward path") {
  const GridSpec g = make_grid(2, 6);
  CellSet src = random_set(g, 60, 41);
  CellSet mask = dilate(random_set(g, 200, 42), 1);
  Mat rot = Mat::Identity();
  rot << 0.6, -0.8, 0, 0.8, 0.6, 0, 0, 0, 1;
  const Transform t = Transform::affine(2, -0.9 * rot, Vec(1.1, 0.3, 0));
  CHECK(transform_into(src, t, mask) == intersect(transform(src, t, g), mask));
  CHECK(transform_into(mask, t, src) == intersect(transform(mask, t, g), src));
}

TEST_CASE("polynomial diffeomorphism covers sampled points") {
  const GridSpec g = make_grid(2, 6);
  CellSet s = random_set(g, 50, 51);
  const Transform t = Transform::polynomial(2, {{0.1, 0.5, 0.3}, {0.0, 0.8}}, 1.0);
  const CellSet img = transform(s, t, g);
  Rng rng(5);
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (int rep = 0; rep < 10; ++rep) {
      Vec p = s.center(i);
      for (int a = 0; a < 2; ++a) p[a] += (rng.uniform() - 0.5) * g.cell_side();
      const Coord c = g.locate(t.apply(p));
      if (g.in_bounds(c)) CHECK(img.contains(c));
    }
  }
}
