#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fractint/transform.hpp"

namespace fractint {

enum class Family { euclidean_distance, dot_product, lm_norm, paraboloid_offset, custom_polynomial };

std::string to_string(Family f);
Family family_from_string(const std::string& name);

// phi(x, y) with closed-form first derivatives and mixed second derivatives.
// custom_polynomial is the bilinear form x^T Q y + a . x + b . y.
struct DefiningFunction {
  Family family = Family::euclidean_distance;
  int dim = 2;
  int m = 4;  // exponent of the l^m norm
  Mat q = Mat::Identity();
  Vec a = Vec::Zero();
  Vec b = Vec::Zero();

  double value(const Vec& x, const Vec& y) const;
  Vec grad_x(const Vec& x, const Vec& y) const;
  Vec grad_y(const Vec& x, const Vec& y) const;
  // entry (i, j) is d^2 phi / dx_i dy_j
  Mat mixed(const Vec& x, const Vec& y) const;
  // Upper bound on |grad_y phi| for x, y in a region of diameter `reach`
  // around the points used.
  double lipschitz_y(const Vec& x, double reach) const;
};

// One or two defining functions, the diffeomorphism used by translations and
// the level values.
struct MapSpec {
  std::vector<DefiningFunction> phi{DefiningFunction{}};
  std::vector<double> level{1.0};
  Transform diffeo = Transform::identity(2);

  int equations() const { return static_cast<int>(phi.size()); }
};

// Largest relative difference between closed-form gradients and central
// differences over seeded points in [0, 1]^d x [0, 1]^d (pairs closer than
// 1/4 are skipped).
double gradient_check(const DefiningFunction& phi, int points = 100, std::uint64_t seed = 1);

struct LevelPair {
  Vec x;
  Vec y;
};

// Seeded pairs with x in [0, 1]^d and phi(x, y) = t (found by bisection along
// random rays of length up to 4 from x).
std::vector<LevelPair> sample_level_set(const DefiningFunction& phi, double t, int count, std::uint64_t seed = 1);

// Smallest |det| of the bordered matrix [[0, grad_x phi], [-grad_y phi^T,
// d^2 phi / dx dy]] over the pairs. Throws when pairs is empty.
double phong_stein_det(const DefiningFunction& phi, const std::vector<LevelPair>& pairs);

// Smallest singular value ratio of the 2 x d gradient stacks at pairs where
// both equations are (approximately) satisfied; > 0 means independent.
double gradient_independence(const DefiningFunction& phi1, const DefiningFunction& phi2,
                             const std::vector<LevelPair>& pairs_x1, const std::vector<Vec>& x2);

}  // namespace fractint
