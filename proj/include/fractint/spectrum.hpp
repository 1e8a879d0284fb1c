#pragma once

#include <array>
#include <complex>
#include <vector>

#include "fractint/measure.hpp"

namespace fractint {

// Weights of a measure laid out on a dense grid covering the bounding box of
// its support.
struct DenseLayout {
  int dim = 1;
  std::array<std::int64_t, 3> lo{0, 0, 0};
  std::array<std::int64_t, 3> extent{1, 1, 1};
};

DenseLayout dense_layout(const DiscreteMeasure& mu);

// Largest dense grid (in cells) the FFT paths will allocate.
inline constexpr std::int64_t kDenseBudget = std::int64_t{1} << 25;

// mu-hat(n / P) for all n with |n_a| < M / 2 where M = P / eps, computed by one
// FFT of size M per axis. Entries are returned in FFT order (index n mod M),
// row-major over the first dim axes. P must be a multiple of the cell side
// with M >= the support extent.
std::vector<std::complex<double>> dense_transform(const DiscreteMeasure& mu, std::int64_t m);

// |mu-hat(n / P)|^2 on the same lattice, via a real-to-complex transform.
// Returns values in full FFT order.
std::vector<double> power_spectrum(const DiscreteMeasure& mu, std::int64_t m);

// Aperiodic autocorrelation A(v) = sum_c W(c) W(c + v) for |v_a| < extent_a,
// indexed by v mod (2 extent_a).
struct Autocorrelation {
  int dim = 1;
  std::array<std::int64_t, 3> size{1, 1, 1};  // 2 * extent per axis
  std::vector<double> values;
};

Autocorrelation autocorrelation(const DiscreteMeasure& mu);

}  // namespace fractint
