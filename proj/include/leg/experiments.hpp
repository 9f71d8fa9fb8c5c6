#pragma once

#include <vector>

#include "leg/heisenberg.hpp"
#include "leg/immersion.hpp"

namespace leg {

// Least-squares slope of log(err) against log(1/n).
double fitted_order(const std::vector<int>& ns, const std::vector<double>& err);

// hi, hi q, hi q^2, ... while above lo.
std::vector<double> geometric_radii(double hi, double lo, double q);

// Mesh over a lifted grid: vertex (i, j) at (phi_ij, u_ij), uv = (i h1, j h2).
// The phi period is the monodromy of the first periodic direction; the other
// one must be an integer multiple of it.
DiscreteImmersion lift_immersion(const LagrangianSampleGrid& grid, const LiftResult& lift);

struct CliffordMinimalityRow {
  int n = 0;
  double area = 0.0;
  double area_rel_error = 0.0;  // against 4 pi^2
  double hopf_max = 0.0;
  double laplacian_beta_max = 0.0;
  double curl_max = 0.0;
  double weak_stationarity = 0.0;
};

// Warped Clifford lift in H^2 at resolution n; weak stationarity with N = 1,
// f = cos s, lambda = 0 and a bump centred off the level set.
CliffordMinimalityRow clifford_minimality(int n, double warp = 0.3);

}  // namespace leg
