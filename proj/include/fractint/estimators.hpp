#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fractint/fit.hpp"
#include "fractint/measure.hpp"

namespace fractint {

// Number of side-2^-j dyadic cells meeting the set.
std::size_t box_count(const CellSet& a, int j);

// Slope of log2 box_count against j over [j_lo, j_hi]; at least 4 levels.
DecayFit minkowski_dim(const CellSet& a, int j_lo, int j_hi);

enum class EnergyMethod { spatial, fourier };

struct EnergyValue {
  double s = 0.0;
  double value = 0.0;
  EnergyMethod method = EnergyMethod::spatial;
};

// Sum of w_i w_j |c_i - c_j|^-s over cell centers, with |x - y| := eps / 2 for
// pairs in the same cell. Direct pair sum for small supports, FFT
// autocorrelation otherwise. Requires 0 < s < d.
EnergyValue energy_spatial(const DiscreteMeasure& mu, double s);

// c(s, d) [P^-d sum over xi in Z^d / P, 0 < |xi| <= xi_max of
// |mu-hat(xi)|^2 |xi|^(s - d) + the xi = 0 cell], with P twice the support
// extent and c(s, d) the constant relating the two forms of the energy.
// Requires 0 < s < d and xi_max <= 2^(k-1).
EnergyValue energy_fourier(const DiscreteMeasure& mu, double s, double xi_max);

// Constant c with I_s(mu) = c * integral |mu-hat|^2 |xi|^(s-d).
double energy_constant(double s, int d);

// mu-hat(xi) = sum_j w_j exp(-2 pi i c_j . xi) over cell centers in box
// coordinates.
std::complex<double> fourier_transform(const DiscreteMeasure& mu, const Vec& xi);
std::vector<std::complex<double>> fourier_transform(const DiscreteMeasure& mu, std::span<const Vec> xis);

// Seeded unit vectors, uniform on the sphere, followed by the 2d signed
// coordinate axes.
std::vector<Vec> sample_directions(int dim, int n, std::uint64_t seed);

struct DecayOptions {
  double xi_lo = 4.0;     // first shell starts here
  double xi_hi = 128.0;   // last shell ends here
  int directions = 64;
  int radii_per_shell = 32;
  std::uint64_t seed = 1;
};

struct DecayReport {
  DecayFit fit;  // slope sigma of log2 shell sup against log2 shell start
  double beta = 0.0;
  std::vector<double> shell_start;
  std::vector<double> shell_sup;
};

// Shell-sup statistic of |mu-hat| over dyadic shells [2^a, 2^(a+1)).
DecayReport fourier_decay(const DiscreteMeasure& mu, const DecayOptions& opt);

// log2 of max over coordinate axes e of |mu-hat(base^j e)| against j log2(base),
// for j in [j_lo, j_hi].
DecayFit axis_decay(const DiscreteMeasure& mu, double base, int j_lo, int j_hi);

struct SlabReport {
  DecayFit fit;  // slope of log2 sup slab mass against log2 delta
  std::vector<double> deltas;
  std::vector<double> sup_mass;
};

// sup over directions w of mu{y : |(y - origin) . w| <= delta}, per delta.
SlabReport hyperplane_exponent(const DiscreteMeasure& mu, const Vec& origin, int directions,
                               std::span<const double> deltas, std::uint64_t seed = 1);

}  // namespace fractint
