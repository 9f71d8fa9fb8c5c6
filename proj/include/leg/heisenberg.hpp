#pragma once

#include <array>
#include <optional>
#include <vector>

#include "leg/field.hpp"
#include "leg/linalg.hpp"
#include "leg/stiefel.hpp"

namespace leg {

struct HeisenbergPoint {
  double phi = 0.0;
  Vec4 y = Vec4::Zero();

  Vec5 coords() const {
    Vec5 x;
    x << phi, y;
    return x;
  }
  static HeisenbergPoint from_coords(const Vec5& x) { return {x(0), x.tail<4>()}; }
};

// alpha = -dphi + y1 dy2 - y2 dy1 + y3 dy4 - y4 dy3, X = (X_phi, X_y).
double contact_form_h(const HeisenbergPoint& q, const Vec5& X);

// Integral of y1 dy2 - y2 dy1 + y3 dy4 - y4 dy3 along the segment a -> b.
inline double lift_increment(const Vec4& a, const Vec4& b) { return jmul(a).dot(b); }

// Samples u(i h1, j h2) stored at u[i * n2 + j].
struct LagrangianSampleGrid {
  int n1 = 0;
  int n2 = 0;
  double h1 = 1.0;
  double h2 = 1.0;
  std::array<bool, 2> periodic{false, false};
  std::vector<Vec4> u;

  const Vec4& at(int i, int j) const { return u[static_cast<size_t>(i) * n2 + j]; }
};

struct LiftResult {
  std::vector<double> phi;                      // same layout as the grid
  std::array<std::optional<double>, 2> periods;  // monodromy along periodic directions
  double max_loop_residual = 0.0;
  long worst_cell = -1;
};

// Default Lagrangian tolerance per cell: 1e-8 * h1 h2 * max|du|^2 (per unit step).
double default_lagrangian_tol(const LagrangianSampleGrid& grid);

// Trapezoidal path integration of the Liouville form, first along row 0, then
// down every column. Throws ConstraintViolation on a non-Lagrangian cell.
LiftResult legendrian_lift(const LagrangianSampleGrid& grid, double base_value,
                           std::optional<double> tol_lag = std::nullopt);

// (phi / r^2, y / r).
HeisenbergPoint dilate(const HeisenbergPoint& q, double r);

// Model gauge relative to q0 (group-law offset); phi_period > 0 reduces the
// relative phi into (-P/2, P/2].
double relative_phi(const HeisenbergPoint& q0, const HeisenbergPoint& q, double phi_period = 0.0);
GaugeFrame gauge_h(const HeisenbergPoint& q0, const HeisenbergPoint& q, double phi_period = 0.0);
double model_gauge(const HeisenbergPoint& q);  // (|y|^4 + 4 phi^2)^(1/4)

// X_h in coordinates (X_phi, X_y).
Vec5 hamiltonian_field_h(const ScalarField& h, const HeisenbergPoint& q,
                         ReebConvention conv = ReebConvention::MinusTwo);

// Coordinate vector -> left-invariant frame (alpha(X), X_y), and back.
Vec5 heis_to_frame(const Vec4& y, const Vec5& X);
Vec5 heis_from_frame(const Vec4& y, const Vec5& f);

double reduce_period(double x, double period);

}  // namespace leg
