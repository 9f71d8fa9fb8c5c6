#pragma once

#include <vector>

#include "leg/immersion.hpp"

namespace leg {

struct EnergyBreakdown {
  double epsilon = 0.0;
  double area = 0.0;
  double penalty = 0.0;  // eps^4 sum (1 + |dT|^2_g)^2 dvol
  double total = 0.0;
  double entropy_indicator = 0.0;  // penalty * log(1/eps)
};

// Per-vertex covector in target coordinates; pair(w) = d/dt E(Lambda + t w).
struct FirstVariation {
  MatX covector;
  double pair(const MatX& w) const { return (covector.array() * w.array()).sum(); }
  double norm() const { return covector.norm(); }
};

// Discrete |dT|^2_g per face: sum over interior edges of c_e |T_f - T_g|^2 with
// c_e = 3 l_e^2 / (2 (A_f + A_g)), each edge shared equally by its two faces.
std::vector<double> gauss_map_density(const DiscreteImmersion& L);

EnergyBreakdown energy(const DiscreteImmersion& L, double eps);

// Tangent-linear derivative along w (w is first projected to the target tangent spaces).
double first_variation(const DiscreteImmersion& L, double eps, const MatX& w);

// Per-face derivative of the area along w; sums to first_variation(L, 0, w).
std::vector<double> face_area_variation(const DiscreteImmersion& L, const MatX& w);

// Reverse-mode gradient, projected to the target tangent spaces.
FirstVariation gradient(const DiscreteImmersion& L, double eps);

// Row-wise projection onto the target tangent spaces.
MatX project_tangent(const DiscreteImmersion& L, const MatX& w);

}  // namespace leg
