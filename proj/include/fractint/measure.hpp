#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fractint/grid.hpp"

namespace fractint {

// Probability measure carried by the cells of a CellSet. Weights are
// normalized on construction.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  DiscreteMeasure(CellSet support, std::vector<double> weights, std::string label = {});

  const CellSet& support() const { return support_; }
  const GridSpec& grid() const { return support_.grid(); }
  std::span<const double> weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_[i]; }
  std::size_t size() const { return weights_.size(); }
  const std::string& label() const { return label_; }

 private:
  CellSet support_;
  std::vector<double> weights_;
  std::string label_;
};

DiscreteMeasure uniform_measure(const CellSet& a, std::string label = {});

// Mass of cells whose centers lie within Euclidean distance delta of x.
// Throws ScaleError when delta < 2 cell sides.
double ball_mass(const DiscreteMeasure& mu, const Vec& x, double delta);

struct AhlforsReport {
  double s = 0.0;
  double c_best = 0.0;
  double c_max = 0.0;
  bool pass = false;
  std::size_t centers = 0;
  std::vector<double> deltas;
  // Worst max(m / delta^s, delta^s / m) over centers, per delta.
  std::vector<double> worst_ratio;
};

// Checks C^-1 delta^s <= mu(B(x, delta)) <= C delta^s over support centers
// (all of them up to 10^4, else a seeded sample of 10^4).
AhlforsReport ad_regularity_check(const DiscreteMeasure& mu, double s,
                                  std::span<const double> deltas, double c_max,
                                  std::uint64_t seed = 1);

}  // namespace fractint
