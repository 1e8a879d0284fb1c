#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fractint/fit.hpp"
#include "fractint/mapspec.hpp"

namespace fractint {

using LatticePoint = std::array<int, 3>;
using LatticePair = std::array<LatticePoint, 2>;

// Integer points n in [0, q]^d with |phi_j(n^j, n) - lambda_j| <= delta for
// j = 1, 2 (only j = 1 in single-equation mode).
struct LatticeConfig {
  int d = 2;
  int q = 8;
  double s = 1.5;
  DefiningFunction phi1;
  DefiningFunction phi2;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  bool single_equation = false;
  // Replaces q^(1 - d/s); only for property checks.
  std::optional<double> delta_override;

  double delta() const;
};

// lambda defaults to 0.75 q sqrt(d). Family must be euclidean-distance or
// lm-norm. Throws InvalidArgument for s outside ((d+1)/2, d), q < 2, d
// outside 2..3 or lambda outside [q/2, 2q].
LatticeConfig make_lattice_config(int d, int q, double s, Family family = Family::euclidean_distance, int m = 4,
                                  std::optional<double> lambda = std::nullopt);

// listed: pairs supplied by the caller.
enum class PairMode { exhaustive, sampled, listed };

struct PairSpec {
  PairMode mode = PairMode::exhaustive;
  std::size_t n_pairs = 4096;
  std::uint64_t seed = 1;
};

// Exhaustive: every (n^1, n^2), n^1-major in lexicographic order. Sampled:
// uniform draws with replacement.
std::vector<LatticePair> make_pairs(int d, int q, const PairSpec& spec);

struct CountTable {
  int d = 2;
  int q = 8;
  PairSpec spec;
  std::vector<LatticePair> pairs;
  std::vector<std::int64_t> nu;
  double mean = 0.0;       // average nu over the pairs
  double aggregate = 0.0;  // q^(-2d) sum over all pairs, or its estimate
  double stderr_aggregate = 0.0;
};

// Full enumeration of n for every pair. Exhaustive pairs require
// (q+1)^(3d) <= 1e9 (BudgetError otherwise).
CountTable count_bruteforce(const LatticeConfig& cfg, const PairSpec& spec);
// Same counts from candidates sorted by their phi_1 value around each n^1.
CountTable count_fast(const LatticeConfig& cfg, const PairSpec& spec);
CountTable count_bruteforce(const LatticeConfig& cfg, std::span<const LatticePair> pairs);
CountTable count_fast(const LatticeConfig& cfg, std::span<const LatticePair> pairs);

// Header n1_0,..,n2_0,..,nu then one row per pair in table order.
void write_csv(std::ostream& out, const CountTable& table);

struct AverageSlope {
  int d = 2;
  double s = 1.5;
  std::vector<int> q;
  std::vector<double> mean;
  std::vector<double> stderr_mean;
  DecayFit fit;  // log2 mean nu against log2 q
  double predicted = 0.0;  // d - 2d/s
  double tolerance = 0.25;
  bool respected = true;
};

// q_list needs at least 4 values spanning 3 octaves, and s > (d+1)/2.
AverageSlope average_slope(int d, double s, std::span<const int> q_list, const PairSpec& spec,
                           Family family = Family::euclidean_distance, int m = 4);

}  // namespace fractint
