#pragma once

#include <functional>

#include "leg/linalg.hpp"

namespace leg {

// Scalar function on target coordinates (R^8 for V2(R^4), (phi, y) for H^2).
struct ScalarField {
  std::function<double(const VecX&)> value;
  std::function<VecX(const VecX&)> gradient;
  std::function<MatX(const VecX&)> hessian;  // optional
};

// Reeb coefficient of X_h = kappa J_H grad^H h + c h R.
//   MinusTwo: c = -2
//   Half:     c = 1/2
// kappa is fixed by requiring the flow to preserve ker(alpha): kappa = c alpha(R) / 2.
enum class ReebConvention { MinusTwo, Half };

inline double reeb_coefficient(ReebConvention c) { return c == ReebConvention::MinusTwo ? -2.0 : 0.5; }

}  // namespace leg
