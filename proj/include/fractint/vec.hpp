#pragma once

#include <Eigen/Core>

namespace fractint {

// Points and matrices are always stored in three components; coordinates past
// the ambient dimension are zero (vectors) or identity (matrices).
using Vec = Eigen::Vector3d;
using Mat = Eigen::Matrix3d;

inline Vec zero_vec() { return Vec::Zero(); }

inline Vec unit_vec(int axis) {
  Vec v = Vec::Zero();
  v[axis] = 1.0;
  return v;
}

}  // namespace fractint
