#include "leg/descent.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <limits>

#include "leg/errors.hpp"
#include "leg/flow.hpp"

namespace leg {

double stage_tolerance(double eps, double tol_scale) { return std::max(1e-8, 1e-3 * eps * eps) * tol_scale; }

namespace {

struct Direction {
  VecX h;
  double grad_norm = 0.0;
  double slope = 0.0;  // dE/dtau along w
};

Direction descent_direction(const DiscreteImmersion& L, double eps, const DescentOptions& opt) {
  const int V = L.num_vertices();
  const int D = L.target.dim();
  const FirstVariation G = gradient(L, eps);
  const auto fits = vertex_fits(L);
  const Eigen::SparseMatrix<double> M = hamiltonian_operator(L, fits, opt.convention);
  VecX g(V * D);
  for (int v = 0; v < V; ++v) g.segment(v * D, D) = G.covector.row(v).transpose();
  const VecX gh_all = M.transpose() * restoration_adjusted_gradient(L, g);

  const SmoothingMetric S = smoothing_metric(L, opt.smoothing);
  const int n = static_cast<int>(S.mass.size());
  Direction out;
  out.h = VecX::Zero(V);
  if (n == 0) return out;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(S.K);
  if (solver.info() != Eigen::Success) throw SolverAbort("smoothing metric failed to factor");
  auto restrict = [&](const VecX& x) {
    VecX r(n);
    for (int v = 0; v < V; ++v)
      if (S.col[v] >= 0) r(S.col[v]) = x(v);
    return r;
  };
  // Steepest descent in the metric K A^-1 K, restricted to h that keep the
  // residual periods fixed to first order.
  auto Ginv = [&](const VecX& x) { return VecX(solver.solve(VecX(S.mass.cwiseProduct(solver.solve(x))))); };
  const VecX gh = restrict(gh_all);
  VecX h_free = -Ginv(gh);
  const MatX C = period_rows(L, M);
  if (C.rows() > 0) {
    MatX Z(n, C.rows()), Cf(C.rows(), n);
    for (Eigen::Index k = 0; k < C.rows(); ++k) {
      Cf.row(k) = restrict(C.row(k).transpose()).transpose();
      Z.col(k) = Ginv(Cf.row(k).transpose());
    }
    const MatX CZ = Cf * Z;
    h_free -= Z * CZ.completeOrthogonalDecomposition().solve(VecX(Cf * h_free));
  }
  out.slope = gh.dot(h_free);
  out.grad_norm = std::sqrt(std::max(0.0, -out.slope));
  for (int v = 0; v < V; ++v)
    if (S.col[v] >= 0) out.h(v) = h_free(S.col[v]);
  return out;
}

DescentRecord make_record(int k, int iter, const EnergyBreakdown& E, double grad_norm, double leg, double tau) {
  DescentRecord r;
  r.k = k;
  r.iter = iter;
  r.epsilon = E.epsilon;
  r.area = E.area;
  r.penalty = E.penalty;
  r.total = E.total;
  r.grad_norm = grad_norm;
  r.max_leg_residual = leg;
  r.entropy_indicator = E.entropy_indicator;
  r.tau = tau;
  return r;
}

}  // namespace

DescentResult descend(const DiscreteImmersion& L0, const DescentOptions& opt,
                      const std::function<void(const DescentRecord&)>& on_step) {
  if (opt.epsilon_schedule.empty()) throw ValidationError("empty epsilon schedule");
  for (size_t k = 0; k < opt.epsilon_schedule.size(); ++k) {
    if (!(opt.epsilon_schedule[k] > 0.0)) throw ValidationError("epsilon must be positive");
    if (k > 0 && !(opt.epsilon_schedule[k] < opt.epsilon_schedule[k - 1]))
      throw ValidationError("epsilon schedule must be decreasing");
  }
  if (!(opt.tau_init > 0.0) || !(opt.tau_max >= opt.tau_init) || !(opt.tau_min > 0.0) || !(opt.armijo > 0.0 && opt.armijo < 1.0))
    throw ValidationError("invalid line-search parameters");

  DescentResult res{L0, {}, {}, false, false, 0.0};
  DiscreteImmersion& L = res.final;
  // Every iterate is restored to the least-squares optimum so that the
  // restoration-adjusted gradient is the true slope along steps.
  RestoreOptions restore;
  restore.tol = 0.0;
  restore.throw_on_failure = false;
  restore_legendrian(L, restore);
  if (legendrian_residual(L).max_abs > L.legendrian_tol)
    throw ConstraintViolation("initial immersion is not restorable within legendrian_tol", -1,
                              legendrian_residual(L).max_abs);
  res.max_leg_residual = legendrian_residual(L).max_abs;
  const std::vector<double> periods0 = residual_periods(L);

  auto emit = [&](const DescentRecord& r) {
    res.trajectory.push_back(r);
    if (on_step) on_step(r);
  };

  int entropy_increases = 0;
  for (size_t k = 0; k < opt.epsilon_schedule.size(); ++k) {
    const double eps = opt.epsilon_schedule[k];
    StageReport st;
    st.k = static_cast<int>(k);
    st.epsilon = eps;
    st.tol = stage_tolerance(eps, opt.tol_scale);
    st.admissibility_target = std::exp(-1.0 / (eps * eps));
    EnergyBreakdown E = energy(L, eps);
    st.start = E;
    Direction dir = descent_direction(L, eps, opt);
    emit(make_record(st.k, 0, E, dir.grad_norm, legendrian_residual(L).max_abs, 0.0));
    double tau = opt.tau_init;
    int iter = 0;
    std::vector<double> history{E.total};
    while (dir.grad_norm > st.tol && iter < opt.max_iters) {
      bool accepted = false;
      while (tau >= opt.tau_min) {
        try {
          FlowStepResult step = hamiltonian_step(L, dir.h, tau, opt.convention, restore);
          if (opt.pin_periods)
            restore_periods(step.immersion, periods0, opt.convention, restore, opt.period_tol, 4, opt.smoothing);
          step.restore.residual_after = legendrian_residual(step.immersion).max_abs;
          const EnergyBreakdown En = energy(step.immersion, eps);
          if (step.restore.residual_after <= L.legendrian_tol && En.total <= E.total + opt.armijo * tau * dir.slope &&
              En.total <= E.total) {
            L = std::move(step.immersion);
            E = En;
            accepted = true;
            break;
          }
        } catch (const StepRejected&) {
        } catch (const DegeneracyError&) {
        }
        tau *= 0.5;
      }
      if (!accepted) {
        st.aborted = true;
        st.diagnostic = "step rejected down to tau_min at iteration " + std::to_string(iter + 1);
        break;
      }
      ++iter;
      dir = descent_direction(L, eps, opt);
      const double leg = legendrian_residual(L).max_abs;
      res.max_leg_residual = std::max(res.max_leg_residual, leg);
      emit(make_record(st.k, iter, E, dir.grad_norm, leg, tau));
      tau = std::min(opt.tau_max, 2.0 * tau);
      history.push_back(E.total);
      const int hs = static_cast<int>(history.size());
      if (opt.stall_window > 0 && hs > opt.stall_window &&
          history[hs - 1 - opt.stall_window] - E.total <= opt.stall_rtol * std::abs(E.total)) {
        st.stalled = true;
        st.diagnostic = "energy stalled at iteration " + std::to_string(iter);
        break;
      }
    }
    st.iterations = iter;
    st.end = E;
    st.grad_norm = dir.grad_norm;
    st.converged = dir.grad_norm <= st.tol;
    res.stages.push_back(st);
    if (st.aborted) {
      res.aborted = true;
      break;
    }
    if (k > 0) {
      const double prev = res.stages[k - 1].end.entropy_indicator;
      entropy_increases = st.end.entropy_indicator > prev ? entropy_increases + 1 : 0;
      if (entropy_increases >= 2) {
        res.stopped_by_entropy = true;
        break;
      }
    }
  }
  return res;
}

}  // namespace leg
