#pragma once

#include <optional>
#include <string>
#include <vector>

namespace fractint {

enum class Theorem {
  mattila,
  translation,
  rotation,
  fourier,
  dilation,
  operator_bound,
  level_set,
  maximal,
  two_equation,
  two_spheres,
  inverse,
  number_theory,
};

std::string to_string(Theorem t);
Theorem theorem_from_string(const std::string& name);

struct PredictInputs {
  int d = 2;
  double s_a = 0.0;
  double s_b = 0.0;
  double alpha = 0.0;   // dimension of the sampling measure (alpha_1 for two equations)
  double alpha2 = 0.0;  // second sampling measure
  double beta = 0.0;    // Fourier dimension of B
  double h = 0.0;       // hyperplane size order of B
  double sobolev = 0.0; // smoothing order of the Radon transform
  int m = 1;            // number of equations
  double gamma = 0.0;   // intersection dimension for the inverse bound
  double s = 0.0;       // lattice exponent
  // Report-only split a + b of the energy exponents.
  double a = 0.0;
  double b = 0.0;
};

struct Thresholds {
  Theorem theorem = Theorem::translation;
  PredictInputs inputs;
  double intersection = 0.0;  // predicted intersection exponent
  std::optional<double> exceptional;
  std::optional<double> count_exponent;
  std::optional<double> lower_bound;
  bool hypotheses_hold = true;
  std::vector<std::string> violations;
};

Thresholds predict(Theorem theorem, const PredictInputs& in);

}  // namespace fractint
