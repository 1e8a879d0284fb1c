#include "fractint/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "fractint/parallel.hpp"

namespace fractint {

namespace {

const std::map<Kind, std::string>& kind_names() {
  static const std::map<Kind, std::string> names{
      {Kind::cantor, "cantor"},
      {Kind::cantor_union, "cantor-union"},
      {Kind::product, "product"},
      {Kind::lattice_thickening, "lattice-thickening"},
      {Kind::paraboloid_lattice, "paraboloid-lattice"},
      {Kind::sphere, "sphere"},
      {Kind::paraboloid_graph, "paraboloid-graph"},
      {Kind::superellipsoid, "superellipsoid"},
      {Kind::hyperplane_patch, "hyperplane-patch"},
      {Kind::box, "box"},
  };
  return names;
}

void require_1d(const GridSpec& g, const char* what) {
  if (g.dim() != 1) throw InvalidArgument(fmt::format("{} needs a 1-D grid", what));
}

}  // namespace

std::string to_string(Kind kind) { return kind_names().at(kind); }

Kind kind_from_string(const std::string& name) {
  for (const auto& [kind, n] : kind_names()) {
    if (n == name) return kind;
  }
  if (name == "f-alpha") return Kind::cantor_union;
  throw InvalidArgument(fmt::format("unknown construction kind '{}'", name));
}

CellSet cantor_set(int p, int n, const GridSpec& grid) {
  require_1d(grid, "cantor_set");
  if (p < 1) throw InvalidArgument("Cantor ratio exponent p must be >= 1");
  if (n < 0) throw InvalidArgument("Cantor depth must be >= 0");
  if (grid.k() < n * p) {
    throw ScaleError(fmt::format("grid level {} too coarse for Cantor depth {} at ratio 2^-{}", grid.k(), n, p));
  }
  const std::int64_t run = std::int64_t{1} << (grid.k() - n * p);
  const std::int64_t jump = (std::int64_t{1} << p) - 1;
  std::vector<CellKey> keys;
  keys.reserve(static_cast<std::size_t>(run) << n);
  for (std::uint64_t word = 0; word < (std::uint64_t{1} << n); ++word) {
    std::int64_t start = 0;
    for (int i = 0; i < n; ++i) {
      if ((word >> (n - 1 - i)) & 1) start += jump << (p * (n - 1 - i));
    }
    for (std::int64_t c = 0; c < run; ++c) keys.push_back(grid.encode({start * run + c, 0, 0}));
  }
  return CellSet(grid, std::move(keys));
}

CellSet f_alpha(int p, int n, const GridSpec& grid) {
  require_1d(grid, "f_alpha");
  if (grid.box_side() < 2) throw InvalidArgument("F_alpha needs a box side of at least 2");
  const CellSet c = cantor_set(p, n, grid);
  const std::int64_t shift = std::int64_t{1} << grid.k();
  std::vector<CellKey> keys(c.keys().begin(), c.keys().end());
  for (std::size_t i = 0; i < c.size(); ++i) keys.push_back(grid.encode({c.coord(i)[0] + shift, 0, 0}));
  return CellSet(grid, std::move(keys));
}

CellSet product_set(std::span<const CellSet> factors) {
  if (factors.empty() || factors.size() > 3) throw InvalidArgument("product needs 1 to 3 factors");
  const GridSpec& f0 = factors[0].grid();
  for (const CellSet& f : factors) {
    require_1d(f.grid(), "product factor");
    if (!(f.grid() == f0)) throw InvalidArgument("product factors live on different grids");
  }
  const int d = static_cast<int>(factors.size());
  const GridSpec g = make_grid(d, f0.k(), f0.box_side());
  std::vector<CellKey> keys;
  std::size_t total = 1;
  for (const CellSet& f : factors) total *= f.size();
  keys.reserve(total);
  Coord c{0, 0, 0};
  const std::size_t n1 = d > 1 ? factors[1].size() : 1;
  const std::size_t n2 = d > 2 ? factors[2].size() : 1;
  for (std::size_t i = 0; i < factors[0].size(); ++i) {
    c[0] = factors[0].coord(i)[0];
    for (std::size_t j = 0; j < n1; ++j) {
      if (d > 1) c[1] = factors[1].coord(j)[0];
      for (std::size_t l = 0; l < n2; ++l) {
        if (d > 2) c[2] = factors[2].coord(l)[0];
        keys.push_back(g.encode(c));
      }
    }
  }
  return CellSet(g, std::move(keys));
}

namespace {

CellSet thicken(std::span<const int> extents, int q, double s, const GridSpec& grid) {
  const int d = grid.dim();
  if (q < 2) throw InvalidArgument("lattice size q must be >= 2");
  if (!(s > 0.0) || s > d) throw InvalidArgument(fmt::format("lattice exponent {} outside (0, {}]", s, d));
  const double rho = std::pow(static_cast<double>(q), -d / s);
  if (grid.cell_side() > rho / 4) {
    throw ScaleError(fmt::format("cell side {} exceeds a quarter of the thickening radius {}", grid.cell_side(), rho));
  }
  const std::int64_t n = grid.cells_per_axis();
  const double inv = std::ldexp(1.0, grid.k());
  std::vector<CellKey> keys;
  std::array<int, 3> idx{0, 0, 0};
  std::array<int, 3> hi{0, 0, 0};
  for (int a = 0; a < d; ++a) hi[a] = extents[a];
  for (idx[0] = 0; idx[0] <= hi[0]; ++idx[0]) {
    for (idx[1] = 0; idx[1] <= hi[1]; ++idx[1]) {
      for (idx[2] = 0; idx[2] <= hi[2]; ++idx[2]) {
        Coord lo{0, 0, 0}, up{0, 0, 0};
        bool empty = false;
        for (int a = 0; a < d; ++a) {
          const double centre = static_cast<double>(idx[a]) / q;
          lo[a] = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor((centre - rho) * inv)));
          up[a] = std::min<std::int64_t>(n - 1, static_cast<std::int64_t>(std::floor((centre + rho) * inv)));
          empty = empty || lo[a] > up[a];
        }
        if (empty) continue;
        Coord c{0, 0, 0};
        for (c[0] = lo[0]; c[0] <= up[0]; ++c[0]) {
          for (c[1] = lo[1]; c[1] <= up[1]; ++c[1]) {
            for (c[2] = lo[2]; c[2] <= up[2]; ++c[2]) keys.push_back(grid.encode(c));
          }
        }
      }
    }
  }
  return CellSet(grid, std::move(keys));
}

}  // namespace

CellSet lattice_thickening(int q, double s, const GridSpec& grid) {
  const std::vector<int> extents(static_cast<std::size_t>(grid.dim()), q);
  return thicken(extents, q, s, grid);
}

std::vector<int> paraboloid_extents(int q, int d) {
  const double base = std::pow(static_cast<double>(q), static_cast<double>(d) / (d + 1));
  // q^(d/(d+1)) and its square, floored with a guard against pow rounding
  const auto floor_guard = [](double v) { return static_cast<int>(std::floor(v + 1e-9)); };
  std::vector<int> e(static_cast<std::size_t>(d), floor_guard(base));
  e.back() = floor_guard(base * base);
  return e;
}

CellSet paraboloid_lattice(int q, double s, const GridSpec& grid) {
  if (grid.dim() < 2) throw InvalidArgument("paraboloid lattice needs d >= 2");
  return thicken(paraboloid_extents(q, grid.dim()), q, s, grid);
}

namespace {

// Interval bounds of a scalar function over a closed cell.
struct Range {
  double lo;
  double hi;
};

struct SurfaceGeometry {
  SurfaceSpec spec;
  Vec centre;
  double radius;
  int dim;

  // Exact range of the defining function over the box [lo, hi].
  Range range(const Vec& lo, const Vec& hi) const {
    switch (spec.kind) {
      case Surface::sphere:
      case Surface::superellipsoid: {
        const double m = spec.kind == Surface::sphere ? 2.0 : spec.m;
        double near = 0.0, far = 0.0;
        for (int a = 0; a < dim; ++a) {
          const double l = (lo[a] - centre[a]) / radius, h = (hi[a] - centre[a]) / radius;
          const double n = (l <= 0.0 && h >= 0.0) ? 0.0 : std::min(std::abs(l), std::abs(h));
          near += std::pow(n, m);
          far += std::pow(std::max(std::abs(l), std::abs(h)), m);
        }
        return {near - 1.0, far - 1.0};
      }
      case Surface::paraboloid_graph: {
        double near = 0.0, far = 0.0;
        for (int a = 0; a + 1 < dim; ++a) {
          const double n = (lo[a] <= 0.0 && hi[a] >= 0.0) ? 0.0 : std::min(std::abs(lo[a]), std::abs(hi[a]));
          near += n * n;
          const double f = std::max(std::abs(lo[a]), std::abs(hi[a]));
          far += f * f;
        }
        return {lo[dim - 1] - far, hi[dim - 1] - near};
      }
      case Surface::hyperplane_patch: {
        double l = 0.0, h = 0.0;
        for (int a = 0; a < dim; ++a) {
          const double w = spec.normal[a];
          l += w * ((w >= 0 ? lo[a] : hi[a]) - centre[a]);
          h += w * ((w >= 0 ? hi[a] : lo[a]) - centre[a]);
        }
        return {l, h};
      }
    }
    return {1.0, 1.0};
  }

  bool in_domain(const Vec& lo, const Vec& hi) const {
    if (spec.kind != Surface::paraboloid_graph) return true;
    for (int a = 0; a < dim; ++a) {
      if (hi[a] < 0.0 || lo[a] > 1.0) return false;
    }
    return true;
  }

  // First-order distance |F| / |grad F| at a point, or a negative value when
  // the point falls outside the parameter domain.
  double distance(const Vec& x) const {
    switch (spec.kind) {
      case Surface::sphere:
        return std::abs((x - centre).head(dim).norm() - radius);
      case Surface::superellipsoid: {
        double f = 0.0, g2 = 0.0;
        for (int a = 0; a < dim; ++a) {
          const double u = (x[a] - centre[a]) / radius;
          f += std::pow(u, spec.m);
          const double g = spec.m * std::pow(std::abs(u), spec.m - 1) / radius;
          g2 += g * g;
        }
        return g2 > 0.0 ? std::abs(f - 1.0) / std::sqrt(g2) : 1e300;
      }
      case Surface::paraboloid_graph: {
        double r2 = 0.0, g2 = 1.0;
        for (int a = 0; a + 1 < dim; ++a) {
          if (x[a] < 0.0 || x[a] > 1.0) return -1.0;
          r2 += x[a] * x[a];
          g2 += 4.0 * x[a] * x[a];
        }
        return std::abs(x[dim - 1] - r2) / std::sqrt(g2);
      }
      case Surface::hyperplane_patch: {
        double f = 0.0;
        for (int a = 0; a < dim; ++a) f += spec.normal[a] * (x[a] - centre[a]);
        return std::abs(f);
      }
    }
    return -1.0;
  }
};

// Area of the surface inside a cell via a tent-smoothed coarea sum over
// sub-cells; floored so every hit cell keeps positive weight.
double cell_area(const SurfaceGeometry& geo, const Vec& lo, double h) {
  const int d = geo.dim;
  const int m = d == 2 ? 16 : 6;
  const double sub = h / m;
  const double width = 1.5 * sub;
  const int n1 = m, n2 = d > 1 ? m : 1, n3 = d > 2 ? m : 1;
  double acc = 0.0;
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      for (int l = 0; l < n3; ++l) {
        Vec x = lo;
        x[0] += (i + 0.5) * sub;
        if (d > 1) x[1] += (j + 0.5) * sub;
        if (d > 2) x[2] += (l + 0.5) * sub;
        const double dist = geo.distance(x);
        if (dist < 0.0 || dist >= width) continue;
        acc += (1.0 - dist / width) / width;
      }
    }
  }
  const double volume = std::pow(sub, d);
  return std::max(acc * volume, 1e-3 * std::pow(h, d - 1));
}

}  // namespace

DiscreteMeasure surface_measure(const SurfaceSpec& spec, const GridSpec& grid) {
  const int d = grid.dim();
  if (d < 2) throw InvalidArgument("surfaces need d in {2, 3}");
  if (spec.kind == Surface::superellipsoid && (spec.m < 2 || spec.m % 2 != 0)) {
    throw InvalidArgument(fmt::format("superellipsoid exponent {} must be even and >= 2", spec.m));
  }
  SurfaceSpec s = spec;
  if (s.kind == Surface::hyperplane_patch) {
    Vec nrm = Vec::Zero();
    nrm.head(d) = s.normal.head(d);
    if (nrm.norm() == 0.0) throw InvalidArgument("hyperplane normal must be nonzero");
    s.normal = nrm / nrm.norm();
  }
  const double L = static_cast<double>(grid.box_side());
  SurfaceGeometry geo{s, Vec::Zero(), s.radius > 0.0 ? s.radius : 0.5 * L, d};
  if (s.kind != Surface::paraboloid_graph) {
    for (int a = 0; a < d; ++a) geo.centre[a] = L / 2;
  }

  // Candidate rows: scan the grid level by level from a coarse cover.
  const double h = grid.cell_side();
  const int start = std::min(grid.k(), 3);
  std::vector<CellKey> current;
  {
    const GridSpec coarse = grid.at_level(start);
    const CellSet all = CellSet::full(coarse);
    for (std::size_t i = 0; i < all.size(); ++i) current.push_back(all.key(i));
  }
  for (int level = start; level <= grid.k(); ++level) {
    const GridSpec g = grid.at_level(level);
    const double side = g.cell_side();
    std::vector<CellKey> kept;
    for (CellKey key : current) {
      const Coord c = g.decode(key);
      Vec lo = Vec::Zero(), hi = Vec::Zero();
      for (int a = 0; a < d; ++a) {
        lo[a] = c[a] * side;
        hi[a] = (c[a] + 1) * side;
      }
      const Range r = geo.range(lo, hi);
      if (r.lo <= 0.0 && r.hi >= 0.0 && geo.in_domain(lo, hi)) kept.push_back(key);
    }
    if (level == grid.k()) {
      current = std::move(kept);
      break;
    }
    const GridSpec next = grid.at_level(level + 1);
    current.clear();
    for (CellKey key : kept) {
      const Coord c = g.decode(key);
      for (int child = 0; child < (1 << d); ++child) {
        Coord cc{0, 0, 0};
        for (int a = 0; a < d; ++a) cc[a] = 2 * c[a] + ((child >> a) & 1);
        current.push_back(next.encode(cc));
      }
    }
    std::sort(current.begin(), current.end());
  }
  CellSet cells(grid, std::move(current));
  std::vector<double> w(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    const Coord c = cells.coord(i);
    Vec lo = Vec::Zero();
    for (int a = 0; a < d; ++a) lo[a] = c[a] * h;
    w[i] = cell_area(geo, lo, h);
  });
  static const char* names[] = {"sphere", "paraboloid-graph", "superellipsoid", "hyperplane-patch"};
  return DiscreteMeasure(std::move(cells), std::move(w), names[static_cast<int>(s.kind)]);
}

double design_dimension(const Descriptor& desc) {
  switch (desc.kind) {
    case Kind::cantor:
    case Kind::cantor_union:
      return 1.0 / desc.p;
    case Kind::product: {
      double sum = 0.0;
      for (const Descriptor& f : desc.factors) sum += design_dimension(f);
      return sum;
    }
    case Kind::lattice_thickening:
    case Kind::paraboloid_lattice:
      return desc.s;
    case Kind::sphere:
    case Kind::paraboloid_graph:
    case Kind::superellipsoid:
    case Kind::hyperplane_patch:
      return desc.d - 1.0;
    case Kind::box:
      return desc.d;
  }
  return 0.0;
}

std::string describe(const Descriptor& desc) {
  switch (desc.kind) {
    case Kind::cantor:
      return fmt::format("cantor(1/{},n={})", 1 << desc.p, desc.n);
    case Kind::cantor_union:
      return fmt::format("f_alpha(1/{},n={})", 1 << desc.p, desc.n);
    case Kind::product: {
      std::string s;
      for (const Descriptor& f : desc.factors) s += (s.empty() ? "" : "x") + describe(f);
      return s;
    }
    case Kind::lattice_thickening:
      return fmt::format("lattice(q={},s={})", desc.q, desc.s);
    case Kind::paraboloid_lattice:
      return fmt::format("paraboloid-lattice(q={},s={})", desc.q, desc.s);
    case Kind::sphere:
      return fmt::format("sphere(d={},r={})", desc.d, desc.radius > 0 ? desc.radius : 0.5 * desc.box_side);
    case Kind::paraboloid_graph:
      return fmt::format("paraboloid-graph(d={})", desc.d);
    case Kind::superellipsoid:
      return fmt::format("superellipsoid(d={},m={},r={})", desc.d, desc.m,
                         desc.radius > 0 ? desc.radius : 0.5 * desc.box_side);
    case Kind::hyperplane_patch:
      return fmt::format("hyperplane(d={})", desc.d);
    case Kind::box:
      return desc.extent > 0 ? fmt::format("box(d={},side={})", desc.d, desc.extent)
                             : fmt::format("box(d={})", desc.d);
  }
  return "?";
}

namespace {

CellSet box_cells(const GridSpec& g, double extent) {
  const std::int64_t n = std::min<std::int64_t>(
      g.cells_per_axis(), static_cast<std::int64_t>(std::ceil(extent * std::ldexp(1.0, g.k()) - 1e-9)));
  std::vector<CellKey> keys;
  Coord c{0, 0, 0};
  const std::int64_t n1 = g.dim() > 1 ? n : 1, n2 = g.dim() > 2 ? n : 1;
  for (c[0] = 0; c[0] < n; ++c[0])
    for (c[1] = 0; c[1] < n1; ++c[1])
      for (c[2] = 0; c[2] < n2; ++c[2]) keys.push_back(g.encode(c));
  return CellSet(g, std::move(keys));
}

}  // namespace

Construction build(const Descriptor& desc) {
  Construction out;
  out.kind = desc.kind;
  out.label = describe(desc);
  out.design_dimension = design_dimension(desc);
  const double L = static_cast<double>(desc.box_side);
  switch (desc.kind) {
    case Kind::cantor:
      out.measure = uniform_measure(cantor_set(desc.p, desc.n, make_grid(1, desc.k, desc.box_side)), out.label);
      break;
    case Kind::cantor_union:
      out.measure = uniform_measure(f_alpha(desc.p, desc.n, make_grid(1, desc.k, desc.box_side)), out.label);
      break;
    case Kind::product: {
      std::vector<CellSet> sets;
      std::vector<DiscreteMeasure> measures;
      for (Descriptor f : desc.factors) {
        f.d = 1;
        f.k = desc.k;
        f.box_side = desc.box_side;
        Construction c = build(f);
        sets.push_back(c.cells());
        measures.push_back(c.measure);
      }
      CellSet cells = product_set(sets);
      std::vector<double> w;
      w.reserve(cells.size());
      const std::size_t n1 = sets.size() > 1 ? sets[1].size() : 1, n2 = sets.size() > 2 ? sets[2].size() : 1;
      for (std::size_t i = 0; i < sets[0].size(); ++i)
        for (std::size_t j = 0; j < n1; ++j)
          for (std::size_t l = 0; l < n2; ++l) {
            double v = measures[0].weight(i);
            if (sets.size() > 1) v *= measures[1].weight(j);
            if (sets.size() > 2) v *= measures[2].weight(l);
            w.push_back(v);
          }
      out.measure = DiscreteMeasure(std::move(cells), std::move(w), out.label);
      break;
    }
    case Kind::lattice_thickening:
      out.measure = uniform_measure(lattice_thickening(desc.q, desc.s, make_grid(desc.d, desc.k, desc.box_side)), out.label);
      break;
    case Kind::paraboloid_lattice:
      out.measure = uniform_measure(paraboloid_lattice(desc.q, desc.s, make_grid(desc.d, desc.k, desc.box_side)), out.label);
      break;
    case Kind::sphere:
    case Kind::paraboloid_graph:
    case Kind::superellipsoid:
    case Kind::hyperplane_patch: {
      SurfaceSpec spec;
      spec.kind = desc.kind == Kind::sphere             ? Surface::sphere
                  : desc.kind == Kind::paraboloid_graph ? Surface::paraboloid_graph
                  : desc.kind == Kind::superellipsoid   ? Surface::superellipsoid
                                                        : Surface::hyperplane_patch;
      spec.radius = desc.radius;
      spec.m = desc.m;
      spec.normal = desc.normal;
      out.measure = surface_measure(spec, make_grid(desc.d, desc.k, desc.box_side));
      out.measure = DiscreteMeasure(out.measure.support(),
                                    std::vector<double>(out.measure.weights().begin(), out.measure.weights().end()),
                                    out.label);
      if (desc.kind != Kind::paraboloid_graph) {
        for (int a = 0; a < desc.d; ++a) out.origin[a] = L / 2;
      }
      break;
    }
    case Kind::box:
      out.measure = uniform_measure(box_cells(make_grid(desc.d, desc.k, desc.box_side), desc.extent > 0 ? desc.extent : L),
                                    out.label);
      break;
  }
  return out;
}

}  // namespace fractint
