#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "leg/energy.hpp"
#include "leg/field.hpp"
#include "leg/immersion.hpp"

namespace leg {

struct DescentOptions {
  std::vector<double> epsilon_schedule{0.2};
  double tol_scale = 1.0;
  double tau_init = 1.0;
  double tau_min = 1e-10;
  double tau_max = 1e3;
  double armijo = 1e-4;
  int max_iters = 200;
  std::uint64_t seed = 0;
  ReebConvention convention = ReebConvention::MinusTwo;
  // Length scale of the smoothing metric on Hamiltonians.
  double smoothing = 1.0;
  // Hold the residual periods at their initial values (see restore_periods).
  bool pin_periods = true;
  // A stage also ends (unconverged, flagged stalled) once the last stall_window
  // accepted steps together lowered E by less than stall_rtol * |E|.
  int stall_window = 10;
  double stall_rtol = 1e-8;
  double period_tol = 1e-12;
};

// Stage tolerance max(1e-8, 1e-3 eps^2) * tol_scale.
double stage_tolerance(double eps, double tol_scale);

// One record per accepted step (iter 0 is the stage start).
struct DescentRecord {
  int k = 0;
  int iter = 0;
  double epsilon = 0.0;
  double area = 0.0;
  double penalty = 0.0;
  double total = 0.0;
  double grad_norm = 0.0;
  double max_leg_residual = 0.0;
  double entropy_indicator = 0.0;
  double tau = 0.0;
};

struct StageReport {
  int k = 0;
  double epsilon = 0.0;
  double tol = 0.0;
  EnergyBreakdown start;
  EnergyBreakdown end;
  int iterations = 0;
  double grad_norm = 0.0;
  // exp(-eps^-2): the almost-criticality bound, reported only.
  double admissibility_target = 0.0;
  bool converged = false;
  bool aborted = false;
  bool stalled = false;
  std::string diagnostic;
};

struct DescentResult {
  DiscreteImmersion final;
  std::vector<DescentRecord> trajectory;
  std::vector<StageReport> stages;
  bool stopped_by_entropy = false;
  bool aborted = false;
  double max_leg_residual = 0.0;
};

// Steepest descent of E_eps along discrete Hamiltonian deformations. The direction
// is h = -(K A^-1 K)^-1 M^T dE with K = A + s^2 L (vertex mass plus cotangent
// stiffness), followed by a flow step with Legendrian restoration and Armijo
// backtracking. Directions keep the residual periods fixed to first order and
// each trial step is corrected back onto them. A stage stops at grad_norm <= tol_k; a step-rejection cascade
// below tau_min aborts the run.
DescentResult descend(const DiscreteImmersion& L0, const DescentOptions& opt,
                      const std::function<void(const DescentRecord&)>& on_step = {});

}  // namespace leg
