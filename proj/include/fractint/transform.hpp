#pragma once

#include <vector>

#include "fractint/grid.hpp"

namespace fractint {

// Map of R^d into itself: affine (x -> A x + b) or a componentwise polynomial
// diffeomorphism (x_i -> p_i(x_i)).
class Transform {
 public:
  static Transform identity(int dim);
  static Transform translation(int dim, const Vec& z);
  // x -> center + g (x - center). Throws unless g is orthogonal to 1e-9.
  static Transform rotation(int dim, const Mat& g, const Vec& center = Vec::Zero());
  // x -> center + t (x - center), t > 0.
  static Transform dilation(int dim, double t, const Vec& center = Vec::Zero());
  // Throws when the linear part is singular.
  static Transform affine(int dim, const Mat& a, const Vec& b);
  // coeffs[i][p] multiplies x_i^p. The derivative of every component is
  // checked for zeros or sign changes on sampled points of [0, box_side].
  static Transform polynomial(int dim, std::vector<std::vector<double>> coeffs, double box_side);

  int dim() const { return dim_; }
  bool is_affine() const { return coeffs_.empty(); }
  const Mat& linear() const { return a_; }
  const Vec& offset() const { return b_; }

  Vec apply(const Vec& x) const;
  // Upper bound on the Euclidean Lipschitz constant over the working box.
  double lipschitz() const { return lip_; }
  // Affine maps only.
  Transform inverse() const;
  // Linear part has only 0 and +-1 entries, one nonzero per row.
  bool signed_permutation() const;

 private:
  Transform() = default;
  void finish_affine();

  int dim_ = 1;
  Mat a_ = Mat::Identity();
  Vec b_ = Vec::Zero();
  std::vector<std::vector<double>> coeffs_;
  double lip_ = 1.0;
};

// Conservative image of the realized set of `a` on the grid `out`: every
// point of T(a) lies in the returned cells. Output cell c is kept when
// |T(center_b) - center_c|_inf <= R for some source cell b, with
// R = eps_out / 2 + Lip * half_diagonal_in. Maps that send centers exactly onto
// centers (signed permutations with a whole-cell offset, same resolution) use
// R = eps_out / 4, which makes them exact.
CellSet transform(const CellSet& a, const Transform& t, const GridSpec& out);

// Same as intersect(transform(a, t, mask.grid()), mask), computed from
// whichever side is smaller when t is affine.
CellSet transform_into(const CellSet& a, const Transform& t, const CellSet& mask);

}  // namespace fractint
