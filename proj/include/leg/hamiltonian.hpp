#pragma once

#include <functional>
#include <random>
#include <vector>

#include "leg/field.hpp"
#include "leg/immersion.hpp"

namespace leg {

struct Monomial {
  double coeff = 0.0;
  std::vector<int> powers;
};

// Polynomial in target coordinates with analytic derivatives.
struct Polynomial {
  int dim = 0;
  std::vector<Monomial> terms;

  double value(const VecX& x) const;
  VecX gradient(const VecX& x) const;
  MatX hessian(const VecX& x) const;
  ScalarField field() const;
  double coefficient_norm() const;
};

// Random polynomial of total degree <= degree with N(0,1) coefficients.
Polynomial random_polynomial(int dim, int degree, std::mt19937_64& rng);

ScalarField constant_field(double c);
ScalarField coordinate_field(int dim, int i, double scale = 1.0);
// Smooth bump psi(|x - c|^2 / r^2) with psi(t) = (1 - t)^4 for t < 1, restricted to
// the given coordinate slots (empty = all).
ScalarField bump_field(const VecX& center, double radius, std::vector<int> slots = {});

struct HamiltonianSpec {
  ScalarField h;
  ReebConvention convention = ReebConvention::MinusTwo;
  // Optional support test; when empty the support is {h != 0 or dh != 0}.
  std::function<bool(const VecX&)> in_support;

  bool supported_at(const VecX& q) const;
};

// w_h(v) = X_h(Lambda(v)), one row per vertex.
MatX hamiltonian_deformation(const DiscreteImmersion& L, const HamiltonianSpec& hs);

// Pointwise contact checks for a vector field Y on the target.
using VectorField = std::function<VecX(const VecX&)>;

// (L_Y alpha)(X) by central differences (step for both the point and the flow).
double lie_derivative_alpha(const Target& t, const VectorField& Y, const VecX& q, const VecX& X, double step = 1e-4);

// |alpha_{q + tau Y}(X + tau DY.X)| for horizontal X: O(tau^2) iff Y is contact.
double first_order_violation(const Target& t, const VectorField& Y, const VecX& q, const VecX& X, double tau);

VectorField hamiltonian_vector_field(const Target& t, const ScalarField& h, ReebConvention conv);

// Random point of the target and random horizontal unit vector there.
VecX random_point(const Target& t, std::mt19937_64& rng, double scale = 1.0);
VecX random_horizontal(const Target& t, const VecX& q, std::mt19937_64& rng);
VecX random_tangent(const Target& t, const VecX& q, std::mt19937_64& rng);

}  // namespace leg
