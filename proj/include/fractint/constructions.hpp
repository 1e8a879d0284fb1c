#pragma once

#include <span>
#include <string>
#include <vector>

#include "fractint/measure.hpp"

namespace fractint {

enum class Kind {
  cantor,
  cantor_union,
  product,
  lattice_thickening,
  paraboloid_lattice,
  sphere,
  paraboloid_graph,
  superellipsoid,
  hyperplane_patch,
  box,
};

std::string to_string(Kind kind);
Kind kind_from_string(const std::string& name);

// Construction parameters as read from a config. Unused fields are ignored
// by kinds that do not need them.
struct Descriptor {
  Kind kind = Kind::box;
  int d = 1;
  int k = 8;
  std::int64_t box_side = 1;
  int p = 2;          // Cantor ratio 2^-p
  int n = 1;          // Cantor depth
  int q = 8;          // lattice size
  double s = 1.0;     // lattice exponent
  int m = 2;          // superellipsoid exponent
  double radius = 0;  // surfaces; 0 selects 0.5 * L
  double extent = 0;  // box side; 0 selects L
  Vec normal = Vec::UnitX();
  std::vector<Descriptor> factors;  // product
};

// A set with its natural measure, intended dimension and the box coordinates
// of its mathematical origin (the point that plays the role of 0 when the set
// is reflected, rotated or dilated).
struct Construction {
  Kind kind = Kind::box;
  std::string label;
  DiscreteMeasure measure;
  double design_dimension = 0.0;
  Vec origin = Vec::Zero();

  const CellSet& cells() const { return measure.support(); }
  const GridSpec& grid() const { return measure.grid(); }
};

// Generation-n Cantor set in [0, 1] keeping the first and last subintervals of
// ratio 2^-p. Requires a 1-D grid with k >= n p.
CellSet cantor_set(int p, int n, const GridSpec& grid);
// Cantor set together with its translate by 1. Requires L >= 2.
CellSet f_alpha(int p, int n, const GridSpec& grid);
// Cartesian product of 1-D sets on a common grid.
CellSet product_set(std::span<const CellSet> factors);
// Chebyshev q^(-d/s)-neighborhood of the points i/q, 0 <= i_j <= q, clipped to
// the box. Requires 2^-k <= q^(-d/s) / 4.
CellSet lattice_thickening(int q, double s, const GridSpec& grid);
// Same thickening around the anisotropic lattice
// q^-1 (Z^d cap [0, q^(d/(d+1))]^(d-1) x [0, q^(2d/(d+1))]).
CellSet paraboloid_lattice(int q, double s, const GridSpec& grid);
// Lattice extents (before scaling) of the paraboloid lattice.
std::vector<int> paraboloid_extents(int q, int d);

enum class Surface { sphere, paraboloid_graph, superellipsoid, hyperplane_patch };

struct SurfaceSpec {
  Surface kind = Surface::sphere;
  double radius = 0.0;  // sphere / superellipsoid; 0 selects 0.5 * L
  int m = 2;            // superellipsoid exponent, even
  Vec normal = Vec::UnitX();
};

// Cells meeting the surface (closed cells), weighted by the surface area they
// contain. Sphere, superellipsoid and hyperplane are centered in the box; the
// paraboloid graph x_d = |x'|^2 lives over [0,1]^(d-1).
DiscreteMeasure surface_measure(const SurfaceSpec& spec, const GridSpec& grid);

Construction build(const Descriptor& desc);
double design_dimension(const Descriptor& desc);
std::string describe(const Descriptor& desc);

}  // namespace fractint
