#pragma once

#include <cstdint>
#include <string>

#include "leg/heisenberg.hpp"
#include "leg/immersion.hpp"

namespace leg {

// Regular grid triangulation; cells split along the (i,j)-(i+1,j+1) diagonal.
// Vertex (i, j) has index i * m2 + j with m_k = n_k (+1 if not periodic).
SurfaceMesh grid_mesh(int n1, int n2, bool periodic1, bool periodic2);

struct FlatPatchOptions {
  int n = 8;
  double half_width = 0.5;
  Vec2 center = Vec2::Zero();
  double stretch = 1.0;      // x1 scaled by this factor
  double rotation = 0.0;     // y multiplied by e^{i theta} on both complex factors
  double phi_offset = 0.0;
};

// Heisenberg plane (0, s x1, 0, x2, 0) rotated by e^{i theta}.
DiscreteImmersion flat_patch(const FlatPatchOptions& opt);
DiscreteImmersion flat_patch(int n, double half_width = 0.5);

enum class LiftMethod { Analytic, Trapezoid };

struct CliffordOptions {
  int n = 16;
  TargetKind target = TargetKind::Heisenberg;
  double warp = 0.0;  // s = sigma + warp sin(sigma)
  LiftMethod lift = LiftMethod::Analytic;
};

// Clifford torus u = (cos s, sin s, cos t, sin t) lifted to H^2 (phi = s + t mod 2 pi)
// or the Legendrian torus a = (cos s, sin s, cos t, sin t)/sqrt2,
// b = (cos s, sin s, -cos t, -sin t)/sqrt2 in V2(R^4). uv = (s, t), both 2 pi periodic.
DiscreteImmersion clifford_lift(const CliffordOptions& opt);
DiscreteImmersion clifford_lift(int n, TargetKind target = TargetKind::Heisenberg);

LagrangianSampleGrid clifford_grid(int n);
LagrangianSampleGrid graph_grid(int n);  // u = (s, t, 0, 0), not Lagrangian

// Clifford lift moved by a discrete Hamiltonian deformation with random low-mode h
// of the given amplitude, then restored.
DiscreteImmersion perturbed_clifford(int n, double amplitude, std::uint64_t seed, double warp = 0.0);

struct DoubleSheetOptions {
  int n = 32;
  double half_width = 0.5;
  double rotation = 0.78539816339744831;  // angle between the sheets
  double phi_separation = 0.0;
};
DiscreteImmersion double_sheet(const DoubleSheetOptions& opt);

// Flat patch with one face split at its centroid: an interior valence-3 vertex.
// Tagged invalid for the quadratic fit; exercises the 2-ring fallback.
DiscreteImmersion valence3_cone(int n = 4);
int valence3_vertex(const DiscreteImmersion& L);

// Random displacement of every vertex (then retracted).
DiscreteImmersion perturb_positions(const DiscreteImmersion& L, double amplitude, std::uint64_t seed);

// legendrian_tol = factor * restorable residual, floored at 1e-12.
void set_legendrian_tol_from_restoration(DiscreteImmersion& L, double factor = 2.0);

DiscreteImmersion generate(const std::string& family, int n, double amplitude, std::uint64_t seed);

}  // namespace leg
