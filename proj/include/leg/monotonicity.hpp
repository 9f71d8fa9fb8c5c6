#pragma once

#include <string>
#include <vector>

#include "leg/hamiltonian.hpp"
#include "leg/immersion.hpp"
#include "leg/stiefel.hpp"

namespace leg {

// Gauge of q relative to p0 on either target (Heisenberg: group-law offset,
// phi reduced by the target period).
GaugeFrame target_gauge(const Target& t, const VecX& p0, const VecX& q);

// Coordinate differentials of rho^2 and phi (relative to p0) at q.
void gauge_differentials(const Target& t, const VecX& p0, const VecX& q, VecX& drho2, VecX& dphi);

// Horizontal gradient of the gauge r at q, frame components.
VecX horizontal_gauge_gradient(const Target& t, const VecX& p0, const VecX& q);

// Quintic-smoothstep cutoff: 1 on [0,1], 0 on [2,inf), chi(t) = 1 - S(t - 1)
// with S(x) = 10x^3 - 15x^4 + 6x^5. C^2, chi' <= 0, chi' < -1/2 on [5/4, 7/4].
double cutoff(double t);
double cutoff_d1(double t);
double cutoff_d2(double t);
inline constexpr const char* kCutoffName = "quintic_smoothstep";

// Density weight (1 + s arctan s) / sqrt(1 + s^2), in [1, pi/2].
double density_weight(double sigma);

struct VertexGauge {
  double rho = 0.0;
  double phi = 0.0;
  double r = 0.0;
  double sigma = 0.0;
  double arctan_sigma = 0.0;
  bool singular = false;  // coincides with p0
};

// Per-face fields at corner averages with surface differentials as covectors in
// the chord basis (corner 0 -> 1, corner 0 -> 2).
struct FaceGauge {
  bool valid = false;  // false when a corner is singular
  double area = 0.0;
  double rho2 = 0.0, phi = 0.0, r = 0.0, sigma = 0.0, arctan_sigma = 0.0;
  Vec2 d_rho2 = Vec2::Zero(), d_phi = Vec2::Zero(), d_r = Vec2::Zero(), d_arctan = Vec2::Zero();
  Mat2 g_inv = Mat2::Identity();
  VecD e1, e2;  // chords, frame components at the centroid
  VecX centroid;

  double dot(const Vec2& a, const Vec2& b) const { return a.dot(g_inv * b); }
  double norm2(const Vec2& a) const { return dot(a, a); }
  VecD vector(const Vec2& a) const;  // tangent vector with <vector, e_i> = a_i
};

struct GaugeFields {
  VecX p0;
  std::vector<VertexGauge> vertex;
  std::vector<FaceGauge> face;
};

GaugeFields gauge_fields(const DiscreteImmersion& L, const VecX& p0);

// h_{r,eta} = [chi(r_gauge / r) - chi(r_gauge / eta)] arctan(sigma); support in {eta <= r_gauge <= 2r}.
HamiltonianSpec hamiltonian_arctan(const Target& t, const VecX& p0, double r, double eta,
                                   ReebConvention conv = ReebConvention::MinusTwo);

struct MonotonicityTerm {
  std::string name;
  std::string side;  // "lhs", "rhs", or "bookkeeping"
  double value = 0.0;
};

struct MonotonicityReport {
  double r = 0.0, eta = 0.0;
  std::vector<MonotonicityTerm> terms;  // 14 slots
  double lhs = 0.0, rhs = 0.0;
  double residual = 0.0;         // |lhs - rhs| / max(|lhs|, |rhs|)
  double bookkeeping = 0.0;      // sum of the O(1), O(r) magnitude slots
  double pairing_assembled = 0.0;  // <dh, dbeta> from the chain rule on gauge differentials
  int annulus_faces = 0;
};

// Truncated almost-monotonicity identity, one quadrature slot per displayed
// integral. Throws ResolutionError when {eta < r_gauge < 2r} has < min_faces faces.
MonotonicityReport monotonicity_balance(const DiscreteImmersion& L, const VecX& p0, double r, double eta,
                                        int min_faces = 100);

struct GaugeCheck {
  std::string name;
  double constant = 0.0;    // max defect / scale over the sampled items
  double max_defect = 0.0;
  int count = 0;
};

// Structure, horizontal-gradient and perpendicular-gradient defects fitted
// against r^2 (resp. 1 + r), and the 2/r cap on |d arctan sigma|, over items
// with r_lo <= r_gauge <= r_hi. Face checks project the exact horizontal
// gradients onto the chord plane at the centroid.
std::vector<GaugeCheck> gauge_checks(const DiscreteImmersion& L, const GaugeFields& G, double r_lo, double r_hi);

struct DensityCurve {
  VecX p0;
  std::vector<double> radii;
  std::vector<double> ratios;  // s^-2 Area(r_gauge < s)
  std::vector<int> counts;     // components of {r_gauge < s}
  std::vector<std::string> warnings;
};

double mean_edge_length(const DiscreteImmersion& L);

// Radii below min_edges * mean edge length are dropped with a warning.
DensityCurve density_curve(const DiscreteImmersion& L, const VecX& p0, const std::vector<double>& radii,
                           double min_edges = 3.0);

// Smooth kernel supported in [lo, hi] with unit integral.
struct DensityKernel {
  std::string name;
  double lo = 0.5, hi = 2.0;
  double norm = 1.0;
  double operator()(double t) const;
};
DensityKernel bump_kernel(double lo, double hi, const std::string& name);
std::vector<DensityKernel> standard_kernels();

struct Theta0Estimate {
  std::string kernel;
  double eta = 0.0;
  double theta0 = 0.0;
  int multiplicity = 0;            // round(theta0 / 2 pi)
  double distance_to_integer = 0.0;
};

// eta^-2 sum (eta / r) k(r / eta) w(sigma) dvol; eta <= 0 picks the smallest
// eta whose kernel support starts at min_edges mean edge lengths.
Theta0Estimate theta0_estimate(const DiscreteImmersion& L, const VecX& p0, const DensityKernel& k, double eta = 0.0,
                               double min_edges = 3.0);

struct QuasiMonotonicity {
  double upper = 0.0;  // max ratio(s) / ratio(r) over 0 < 2s < r
  double lower = 0.0;  // min ratio(s) / ratio(r)
  double spike = 0.0;  // max ratio / ratio at the largest radius
};
QuasiMonotonicity quasi_monotonicity(const DensityCurve& c);

}  // namespace leg
