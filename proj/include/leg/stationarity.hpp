#pragma once

#include <vector>

#include "leg/hamiltonian.hpp"
#include "leg/immersion.hpp"

namespace leg {

// Sum over faces of {f > lambda} (majority of corners) of N_f dA_f(w_h), with
// N_f the corner mean of N. Faces crossed by the level line are sampled at the
// crossing points and their midpoint; a sample inside the support of h throws
// LocalisationError naming the face.
double weak_stationarity_residual(const DiscreteImmersion& L, const std::vector<int>& N, const HamiltonianSpec& hs,
                                  const VecX& f, double lambda);

// -2 kappa sum <dh, dbeta> over faces, the right-hand side of the area
// variation identity along w_h.
double area_variation_pairing(const DiscreteImmersion& L, const HamiltonianSpec& hs);

}  // namespace leg
