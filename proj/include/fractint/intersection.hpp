#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fractint/constructions.hpp"
#include "fractint/fit.hpp"
#include "fractint/mapspec.hpp"
#include "fractint/predict.hpp"

namespace fractint {

struct WeightedPoint {
  Vec x = Vec::Zero();
  double weight = 1.0;
};

// Regular grid of per_axis^d midpoints over [lo, hi] weighted by a normalized
// tent profile. Point i has grid coordinate (i / per_axis^(d-1), ...) in
// row-major order.
struct PsiGrid {
  int dim = 2;
  Vec lo = Vec::Zero();
  Vec hi = Vec::Ones();
  int per_axis = 8;
};
std::vector<WeightedPoint> psi_samples(const PsiGrid& grid);

// Middle half of the box of x for which x - B can meet A (bounding boxes in
// the constructions' own coordinates).
PsiGrid overlap_region(const Construction& a, const Construction& b, int per_axis);

// Seeded draws from the measure of a construction, jittered uniformly inside
// the drawn cell, in the construction's own coordinates (origin subtracted).
std::vector<WeightedPoint> measure_samples(const Construction& mu, int n, std::uint64_t seed);

// Haar-distributed elements of O(d): a uniform angle (d = 2) or a uniform unit
// quaternion (d = 3), composed with a reflection with probability 1/2.
std::vector<Mat> haar_sample(int dim, int n, std::uint64_t seed);

// One sampled transformation with the covering counts of its intersection at
// each ladder level.
struct CoveringRecord {
  std::size_t index = 0;
  Vec x = Vec::Zero();
  Mat g = Mat::Identity();
  double t = 1.0;
  Vec x2 = Vec::Zero();
  double weight = 1.0;
  std::vector<std::int64_t> counts;
  // Slope of log2 N against the ladder; -inf when the intersection is empty.
  double gamma = 0.0;
};

enum class Verdict { respected, violated };
std::string to_string(Verdict v);

struct ExperimentResult {
  std::string experiment;
  std::vector<int> ladder;
  std::vector<CoveringRecord> records;
  std::vector<double> averaged_counts;
  DecayFit fit;  // slope is -inf when every intersection is empty
  Thresholds threshold;
  double tolerance = 0.15;
  double margin = 0.1;
  Verdict verdict = Verdict::respected;
  double exceptional_fraction = 0.0;
};

// True when the bound is exceeded while the theorem's hypotheses hold.
bool claims_violation(const ExperimentResult& r);

// Weighted averages, fit, verdict and exceptional fraction from the records
// alone.
ExperimentResult finalize(std::string experiment, std::vector<int> ladder, std::vector<CoveringRecord> records,
                          const Thresholds& threshold, double tolerance, double margin);

// Slope of log2 counts against the ladder levels (-inf if the last is zero).
double ladder_slope(std::span<const std::int64_t> counts, std::span<const int> ladder);

// box_count of the fine set at every ladder level.
std::vector<std::int64_t> covering_counts(const CellSet& fine, std::span<const int> ladder);

// Cells of A^eps meeting T(B^eps) for T(y) = x - m y, with x and y in the
// constructions' own coordinates and eps one cell. A and B must share d and k.
CellSet reflected_intersection(const Construction& a, const Construction& b, const Mat& m, const Vec& x);
std::int64_t covering_number(const Construction& a, const Construction& b, const Mat& m, const Vec& x, int j);

// Cells of A whose centers y satisfy |phi_l(x_l, y) - t_l| <= max(eps, Lip h) for
// every l, with h the cell half-diagonal and Lip the y-Lipschitz bound of phi_l.
class LevelSetIndex {
 public:
  explicit LevelSetIndex(const Construction& a);
  CellSet cells(std::span<const DefiningFunction> phi, std::span<const Vec> x, std::span<const double> t) const;
  const Construction& set() const { return *a_; }

 private:
  const Construction* a_;
  int top_ = 0;
  std::vector<CellSet> levels_;  // coarsened copies from level top_ to k
};

struct ExperimentOptions {
  std::vector<int> ladder;
  double alpha = 0.0;   // dimension of the sampling measure
  double alpha2 = 0.0;  // second sampling measure (two equations)
  std::optional<double> beta;  // Fourier dimension of B, for the decay form of the bound
  double tolerance = 0.15;
  double margin = 0.1;
};

ExperimentResult translation_experiment(const Construction& a, const Construction& b, const Transform& diffeo,
                                        std::span<const WeightedPoint> xs, const ExperimentOptions& opt);

// Every rotation is paired with every x; records are rotation-major.
ExperimentResult rotation_experiment(const Construction& a, const Construction& b, std::span<const Mat> rotations,
                                     std::span<const WeightedPoint> xs, const ExperimentOptions& opt);

// h is the hyperplane size order of B. Records are t-major.
ExperimentResult dilation_experiment(const Construction& a, const Construction& b, std::span<const double> t_grid,
                                     double h, std::span<const WeightedPoint> xs, const ExperimentOptions& opt);

// One equation: phi.phi[0] at level phi.level[0]. Throws when the rotational
// curvature determinant falls below 1e-6 on sampled level-set points.
ExperimentResult level_set_experiment(const Construction& a, const MapSpec& phi, std::span<const WeightedPoint> xs,
                                      const ExperimentOptions& opt);

// Two equations, x1 = xs1[i] paired with x2 = xs2[i].
ExperimentResult two_surface_experiment(const Construction& a, const MapSpec& phi, std::span<const WeightedPoint> xs1,
                                        std::span<const WeightedPoint> xs2, const ExperimentOptions& opt);

// Per x, the largest count over the t grid at each ladder level.
ExperimentResult maximal_experiment(const Construction& a, const MapSpec& phi, std::span<const double> t_grid,
                                    std::span<const WeightedPoint> xs, const ExperimentOptions& opt);

struct ExceptionalReport {
  CellSet cells;  // x-grid cells with gamma above the threshold
  bool empty = true;
  DecayFit fit;
  double threshold = 0.0;
  std::optional<double> predicted;
};

// records[i] must belong to grid point i of `grid` (per_axis a power of two,
// at least 16).
ExceptionalReport exceptional_set_dim(std::span<const CoveringRecord> records, const PsiGrid& grid, double threshold,
                                      std::optional<double> predicted = std::nullopt);

struct InverseReport {
  std::vector<Vec> directions;
  std::vector<double> gamma;   // max over the t grid, per direction
  std::vector<double> best_t;
  double gamma_uniform = 0.0;  // min over directions
  std::size_t witness = 0;
  double bound = 0.0;          // d gamma_uniform / (d - 1)
  DecayFit dimension;          // Minkowski dimension of E
  double gamma_target = 0.0;
  bool target_met = false;     // gamma_uniform >= gamma_target
  bool consistent = false;     // bound <= dimension + 0.1, and the target implication
};

// For each x in u, picks t from t_count values spanning phi(x, E) (skipping
// |t| < eps) with the largest ladder slope.
InverseReport inverse_experiment(const Construction& e, const DefiningFunction& phi, std::span<const Vec> u,
                                 int t_count, std::span<const int> ladder, double gamma_target);

}  // namespace fractint
