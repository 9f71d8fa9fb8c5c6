#pragma once

#include <string>

#include "leg/field.hpp"
#include "leg/linalg.hpp"

namespace leg {

enum class TargetKind { Stiefel, Heisenberg };

std::string to_string(TargetKind k);
TargetKind target_from_string(const std::string& s);

// Uniform access to the two contact targets.
//
// Stiefel: coordinates (a, b) in R^8, frame = ambient R^8 (Euclidean metric).
// Heisenberg: coordinates (phi, y) in R^5, frame = (alpha(X), X_y) so that the
// metric dy^2 + alpha^2 is Euclidean in frame components. Optionally phi lives
// in R / phi_period Z.
//
// In both cases alpha(X) = -<R, X>_frame and |R|^2 = -alpha(R) (2 resp. 1).
struct Target {
  TargetKind kind = TargetKind::Stiefel;
  double phi_period = 0.0;

  int dim() const { return kind == TargetKind::Stiefel ? 8 : 5; }
  double reeb_norm2() const { return kind == TargetKind::Stiefel ? 2.0 : 1.0; }

  VecX diff(const VecX& x, const VecX& y) const;  // y - x
  VecX retract(const VecX& x) const;
  VecX midpoint(const VecX& x, const VecX& y) const;
  VecX tangent_project(const VecX& q, const VecX& X) const;

  double alpha(const VecX& q, const VecX& X) const;
  VecX reeb(const VecX& q) const;
  VecX reeb_flow(const VecX& q, double theta) const;

  VecX to_frame(const VecX& q, const VecX& X) const;
  VecX from_frame(const VecX& q, const VecX& f) const;
  VecX reeb_frame(const VecX& q) const;
  VecX horizontal_frame(const VecX& q, const VecX& f) const;
  VecX jh_frame(const VecX& f) const;  // valid on horizontal frame vectors

  // Riemannian gradient (frame components) of a function with coordinate differential dF.
  VecX frame_gradient(const VecX& q, const VecX& dF) const;

  // X_h = kappa J_H grad^H h + c h R in coordinates.
  VecX hamiltonian_field(const ScalarField& h, const VecX& q, ReebConvention conv) const;
  VecX hamiltonian_field(double h, const VecX& dh, const VecX& q, ReebConvention conv) const;
  double horizontal_coefficient(ReebConvention conv) const {
    return 0.5 * reeb_coefficient(conv) * (-reeb_norm2());
  }
};

}  // namespace leg
