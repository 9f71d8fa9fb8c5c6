#pragma once

#include <Eigen/Sparse>
#include <optional>
#include <vector>

#include "leg/field.hpp"
#include "leg/immersion.hpp"

namespace leg {

struct RestoreOptions {
  int max_iters = 5;
  std::optional<double> tol;  // defaults to the immersion's legendrian_tol
  double regularization = 1e-10;
  bool throw_on_failure = true;
  // Stop early once an iteration shrinks the max residual by less than this factor.
  double stall_ratio = 0.9;
};

struct RestoreReport {
  double residual_before = 0.0;
  double residual_after = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Gauss-Newton on per-vertex Reeb shifts minimizing the sum of squared edge
// residuals; boundary vertices stay fixed. Throws StepRejected when the max
// residual is still above tol after max_iters (unless throw_on_failure is false).
RestoreReport restore_legendrian(DiscreteImmersion& L, const RestoreOptions& opt = {});

struct FlowStepResult {
  DiscreteImmersion immersion;
  RestoreReport restore;
};

// Positions moved by tau * w, retracted, then restored.
FlowStepResult flow_step(const DiscreteImmersion& L, const MatX& w, double tau, const RestoreOptions& opt = {});

// Midpoint step along the discrete Hamiltonian flow of vertex values h: the field
// is re-evaluated at the restored half step, then applied from L. A plain
// flow_step leaves an O(tau^2) residual component that no Reeb shift or
// Hamiltonian move can remove; the midpoint rule pushes it to O(tau^3).
FlowStepResult hamiltonian_step(const DiscreteImmersion& L, const VecX& h, double tau, ReebConvention conv,
                                const RestoreOptions& opt = {});

// Moves and retracts only (no restoration).
DiscreteImmersion displace(const DiscreteImmersion& L, const MatX& w, double tau);

// Linear map from vertex values h to the discrete Hamiltonian field
// w_v = kappa J grad^Sigma h (v) + c h_v R(v) in target coordinates; rows are
// v * D + d. Boundary vertices get w = 0 and their h is ignored.
Eigen::SparseMatrix<double> hamiltonian_operator(const DiscreteImmersion& L, const std::vector<VertexFit>& fits,
                                                 ReebConvention conv);

MatX apply_hamiltonian(const Eigen::SparseMatrix<double>& M, const VecX& h, int V, int D);

// Jacobian of the edge residuals w.r.t. all position coordinates (E x V*D).
Eigen::SparseMatrix<double> residual_jacobian(const DiscreteImmersion& L);

// Gradient of E along restored steps: g - Dr^T J (J^T J)^-1 R^T g, where J is the
// Jacobian of the residuals w.r.t. per-vertex Reeb shifts. Valid at a
// least-squares restored immersion. g is flattened as v * D + d.
VecX restoration_adjusted_gradient(const DiscreteImmersion& L, const VecX& g, double regularization = 1e-10);

// Largest edge residual after restoring a copy with no tolerance; a natural
// floor for legendrian_tol.
double restorable_residual(const DiscreteImmersion& L);

// Vertex-area mass plus s^2 times the cotangent Laplacian, on free (interior)
// vertices; col maps vertex -> row or -1.
struct SmoothingMetric {
  std::vector<int> col;
  VecX mass;
  Eigen::SparseMatrix<double> K;
};
SmoothingMetric smoothing_metric(const DiscreteImmersion& L, double smoothing);

// Periods of the edge-residual one-form. Reeb shifts cannot change them, so
// restoration leaves them alone; the discrete Hamiltonian fields move them at
// O(h^2) relative to the field.
std::vector<double> residual_periods(const DiscreteImmersion& L);

// Row k: derivative of period k along apply_hamiltonian(M, h), as a functional of h.
MatX period_rows(const DiscreteImmersion& L, const Eigen::SparseMatrix<double>& M);

struct PeriodRestoreReport {
  double error_before = 0.0;
  double error_after = 0.0;
  int iterations = 0;
};

// Newton steps along smooth Hamiltonian fields (each followed by Legendrian
// restoration) until the residual periods match target within tol.
PeriodRestoreReport restore_periods(DiscreteImmersion& L, const std::vector<double>& target, ReebConvention conv,
                                    const RestoreOptions& restore, double tol = 1e-12, int max_iters = 4,
                                    double smoothing = 1.0);

}  // namespace leg
