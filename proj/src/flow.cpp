#include "leg/flow.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <limits>

#include "leg/errors.hpp"

namespace leg {

namespace {

std::vector<int> free_columns(const DiscreteImmersion& L, int& n) {
  std::vector<int> col(L.num_vertices(), -1);
  n = 0;
  for (int v = 0; v < L.num_vertices(); ++v)
    if (!L.topo.boundary_vertex[v]) col[v] = n++;
  return col;
}

Eigen::SparseMatrix<double> reeb_jacobian(const DiscreteImmersion& L, const std::vector<int>& col, int n) {
  const int E = L.topo.num_edges();
  std::vector<Eigen::Triplet<double>> trip;
  for (int e = 0; e < E; ++e) {
    const auto [a, b] = L.topo.edges[e];
    const VecX pa = L.point(a), pb = L.point(b);
    const VecX d = L.target.diff(pa, pb);
    const VecX m = L.target.retract(pa + 0.5 * d);
    const VecX Ra = L.target.reeb(pa), Rb = L.target.reeb(pb);
    double ja = -L.target.alpha(m, Ra);
    double jb = L.target.alpha(m, Rb);
    if (L.target.kind == TargetKind::Stiefel) {
      // The retracted midpoint moves too: dm = P_m(dp + dq) / 2.
      ja += 0.5 * L.target.alpha(L.target.tangent_project(m, Ra), d);
      jb += 0.5 * L.target.alpha(L.target.tangent_project(m, Rb), d);
    }
    if (col[a] >= 0) trip.emplace_back(e, col[a], ja);
    if (col[b] >= 0) trip.emplace_back(e, col[b], jb);
  }
  Eigen::SparseMatrix<double> J(E, n);
  J.setFromTriplets(trip.begin(), trip.end());
  return J;
}

}  // namespace

Eigen::SparseMatrix<double> residual_jacobian(const DiscreteImmersion& L) {
  const int E = L.topo.num_edges();
  const int D = L.target.dim();
  std::vector<Eigen::Triplet<double>> trip;
  for (int e = 0; e < E; ++e) {
    const auto [a, b] = L.topo.edges[e];
    const VecX pa = L.point(a), pb = L.point(b);
    VecX ga(D), gb(D);
    if (L.target.kind == TargetKind::Heisenberg) {
      // r = -(phi_b - phi_a) + J y_a . y_b
      ga << 1.0, -jmul(pb.tail<4>());
      gb << -1.0, jmul(pa.tail<4>());
    } else {
      // r = m^T Omega d with m = retract((a + b) / 2), dm = P_m(da + db) / 2
      const VecX d = L.target.diff(pa, pb);
      const VecX m = L.target.retract(pa + 0.5 * d);
      VecX Om(8), Od(8);
      Om << -m.tail<4>(), m.head<4>();
      Od << d.tail<4>(), -d.head<4>();
      const VecX half = 0.5 * L.target.tangent_project(m, Od);
      gb = Om + half;
      ga = -Om + half;
    }
    for (int k = 0; k < D; ++k) {
      trip.emplace_back(e, a * D + k, ga(k));
      trip.emplace_back(e, b * D + k, gb(k));
    }
  }
  Eigen::SparseMatrix<double> Dr(E, L.num_vertices() * D);
  Dr.setFromTriplets(trip.begin(), trip.end());
  return Dr;
}

VecX restoration_adjusted_gradient(const DiscreteImmersion& L, const VecX& g, double regularization) {
  int n = 0;
  const std::vector<int> col = free_columns(L, n);
  if (n == 0) return g;
  const int D = L.target.dim();
  const Eigen::SparseMatrix<double> J = reeb_jacobian(L, col, n);
  VecX Rg = VecX::Zero(n);
  for (int v = 0; v < L.num_vertices(); ++v)
    if (col[v] >= 0) Rg(col[v]) = L.target.reeb(L.point(v)).dot(g.segment(v * D, D));
  Eigen::SparseMatrix<double> N = J.transpose() * J;
  double diag = 0.0;
  for (int i = 0; i < n; ++i) diag += N.coeff(i, i);
  const double reg = regularization * std::max(diag / n, 1e-300);
  for (int i = 0; i < n; ++i) N.coeffRef(i, i) += reg;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(N);
  if (solver.info() != Eigen::Success) throw SolverAbort("restoration normal equations failed to factor");
  const VecX z = solver.solve(Rg);
  return g - residual_jacobian(L).transpose() * (J * z);
}

RestoreReport restore_legendrian(DiscreteImmersion& L, const RestoreOptions& opt) {
  const double tol = opt.tol.value_or(L.legendrian_tol);
  const int V = L.num_vertices();
  const int E = L.topo.num_edges();
  RestoreReport rep;
  LegendrianResidual r = legendrian_residual(L);
  rep.residual_before = rep.residual_after = r.max_abs;
  if (r.max_abs <= tol) {
    rep.converged = true;
    return rep;
  }
  int n = 0;
  const std::vector<int> col = free_columns(L, n);
  if (n == 0) {
    if (opt.throw_on_failure) throw StepRejected("no free vertices to restore", r.max_abs);
    return rep;
  }

  for (int it = 0; it < opt.max_iters && rep.residual_after > tol; ++it) {
    const Eigen::SparseMatrix<double> J = reeb_jacobian(L, col, n);
    VecX re(E);
    for (int e = 0; e < E; ++e) re(e) = r.edge[e];
    Eigen::SparseMatrix<double> N = J.transpose() * J;
    const VecX rhs = -(J.transpose() * re);
    double diag = 0.0;
    for (int i = 0; i < n; ++i) diag += N.coeff(i, i);
    const double reg = opt.regularization * std::max(diag / n, 1e-300);
    for (int i = 0; i < n; ++i) N.coeffRef(i, i) += reg;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(N);
    if (solver.info() != Eigen::Success) throw SolverAbort("restoration normal equations failed to factor");
    const VecX theta = solver.solve(rhs);
    for (int v = 0; v < V; ++v)
      if (col[v] >= 0) L.positions.row(v) = L.target.reeb_flow(L.point(v), theta(col[v])).transpose();
    r = legendrian_residual(L);
    const double prev = rep.residual_after;
    rep.residual_after = r.max_abs;
    rep.iterations = it + 1;
    if (rep.residual_after > opt.stall_ratio * prev) break;
  }
  rep.converged = rep.residual_after <= tol;
  if (!rep.converged && opt.throw_on_failure)
    throw StepRejected("Legendrian restoration did not converge", rep.residual_after);
  return rep;
}

DiscreteImmersion displace(const DiscreteImmersion& L, const MatX& w, double tau) {
  DiscreteImmersion out = L;
  for (int v = 0; v < L.num_vertices(); ++v)
    out.positions.row(v) = L.target.retract(L.point(v) + tau * w.row(v).transpose()).transpose();
  return out;
}

FlowStepResult flow_step(const DiscreteImmersion& L, const MatX& w, double tau, const RestoreOptions& opt) {
  if (!(tau > 0.0)) throw DomainError("flow step needs tau > 0");
  FlowStepResult res{displace(L, w, tau), {}};
  res.restore = restore_legendrian(res.immersion, opt);
  return res;
}

FlowStepResult hamiltonian_step(const DiscreteImmersion& L, const VecX& h, double tau, ReebConvention conv,
                                const RestoreOptions& opt) {
  if (!(tau > 0.0)) throw DomainError("flow step needs tau > 0");
  const int V = L.num_vertices();
  const int D = L.target.dim();
  RestoreOptions half = opt;
  half.throw_on_failure = false;
  const auto M0 = hamiltonian_operator(L, vertex_fits(L), conv);
  const DiscreteImmersion H = flow_step(L, apply_hamiltonian(M0, h, V, D), 0.5 * tau, half).immersion;
  const auto Mh = hamiltonian_operator(H, vertex_fits(H), conv);
  return flow_step(L, apply_hamiltonian(Mh, h, V, D), tau, opt);
}

Eigen::SparseMatrix<double> hamiltonian_operator(const DiscreteImmersion& L, const std::vector<VertexFit>& fits,
                                                 ReebConvention conv) {
  const int V = L.num_vertices();
  const int D = L.target.dim();
  const double c = reeb_coefficient(conv);
  const double kappa = L.target.horizontal_coefficient(conv);
  std::vector<Eigen::Triplet<double>> trip;
  for (int v = 0; v < V; ++v) {
    if (L.topo.boundary_vertex[v]) continue;
    const VertexFit& fit = fits[v];
    const VecX q = L.point(v);
    const Mat2 gi = (fit.A.transpose() * fit.A).inverse();
    const MatX G = fit.A * gi * fit.grad_weights;  // D x k surface gradient weights
    // Frame -> coordinates is linear; apply it column by column.
    VecX self = c * L.target.from_frame(q, L.target.reeb_frame(q));
    for (size_t k = 0; k < fit.stencil.size(); ++k) {
      const int w = fit.stencil[k];
      const VecX col = kappa * L.target.from_frame(q, L.target.jh_frame(L.target.horizontal_frame(q, G.col(k))));
      self -= col;
      if (L.topo.boundary_vertex[w]) continue;
      for (int d = 0; d < D; ++d)
        if (col(d) != 0.0) trip.emplace_back(v * D + d, w, col(d));
    }
    for (int d = 0; d < D; ++d)
      if (self(d) != 0.0) trip.emplace_back(v * D + d, v, self(d));
  }
  Eigen::SparseMatrix<double> M(V * D, V);
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

MatX apply_hamiltonian(const Eigen::SparseMatrix<double>& M, const VecX& h, int V, int D) {
  const VecX w = M * h;
  MatX out(V, D);
  for (int v = 0; v < V; ++v) out.row(v) = w.segment(v * D, D).transpose();
  return out;
}

double restorable_residual(const DiscreteImmersion& L) {
  DiscreteImmersion copy = L;
  RestoreOptions opt;
  opt.tol = 0.0;
  opt.throw_on_failure = false;
  return restore_legendrian(copy, opt).residual_after;
}

SmoothingMetric smoothing_metric(const DiscreteImmersion& L, double smoothing) {
  SmoothingMetric out;
  int n = 0;
  out.col = free_columns(L, n);
  const CotanData cot = cotan_weights(L);
  const double s2 = smoothing * smoothing;
  std::vector<Eigen::Triplet<double>> trip;
  out.mass.resize(n);
  for (int v = 0; v < L.num_vertices(); ++v)
    if (out.col[v] >= 0) {
      out.mass(out.col[v]) = cot.vertex_area[v];
      trip.emplace_back(out.col[v], out.col[v], cot.vertex_area[v]);
    }
  for (int e = 0; e < L.topo.num_edges(); ++e) {
    const auto [a, b] = L.topo.edges[e];
    const double w = s2 * cot.edge_weight[e];
    const int ca = out.col[a], cb = out.col[b];
    if (ca >= 0) trip.emplace_back(ca, ca, w);
    if (cb >= 0) trip.emplace_back(cb, cb, w);
    if (ca >= 0 && cb >= 0) {
      trip.emplace_back(ca, cb, -w);
      trip.emplace_back(cb, ca, -w);
    }
  }
  out.K.resize(n, n);
  out.K.setFromTriplets(trip.begin(), trip.end());
  return out;
}

std::vector<double> residual_periods(const DiscreteImmersion& L) {
  std::vector<double> potential, periods;
  integrate_one_form(L.topo, L.num_faces(), legendrian_residual(L).edge, potential, periods);
  return periods;
}

MatX period_rows(const DiscreteImmersion& L, const Eigen::SparseMatrix<double>& M) {
  const auto P = period_functionals(L.topo, L.num_faces());
  const Eigen::SparseMatrix<double> Dr = residual_jacobian(L);
  MatX out(static_cast<Eigen::Index>(P.size()), L.num_vertices());
  for (size_t k = 0; k < P.size(); ++k) {
    const VecX pk = Eigen::Map<const VecX>(P[k].data(), static_cast<Eigen::Index>(P[k].size()));
    const VecX dr = Dr.transpose() * pk;
    out.row(static_cast<Eigen::Index>(k)) = (M.transpose() * dr).transpose();
  }
  return out;
}

PeriodRestoreReport restore_periods(DiscreteImmersion& L, const std::vector<double>& target, ReebConvention conv,
                                    const RestoreOptions& restore, double tol, int max_iters, double smoothing) {
  PeriodRestoreReport rep;
  auto error = [&](const std::vector<double>& p) {
    if (p.size() != target.size()) throw ValidationError("period target has the wrong length");
    double m = 0.0;
    for (size_t k = 0; k < p.size(); ++k) m = std::max(m, std::abs(p[k] - target[k]));
    return m;
  };
  std::vector<double> p = residual_periods(L);
  rep.error_before = rep.error_after = error(p);
  if (p.empty()) return rep;
  const int V = L.num_vertices();
  while (rep.error_after > tol && rep.iterations < max_iters) {
    const auto fits = vertex_fits(L);
    const Eigen::SparseMatrix<double> M = hamiltonian_operator(L, fits, conv);
    const MatX C = period_rows(L, M);
    const SmoothingMetric S = smoothing_metric(L, smoothing);
    const int n = static_cast<int>(S.mass.size());
    if (n == 0) break;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(S.K);
    if (solver.info() != Eigen::Success) throw SolverAbort("smoothing metric failed to factor");
    // Minimal K-norm h with C h = target - p.
    const int m = static_cast<int>(C.rows());
    MatX KiCt(n, m);
    for (int k = 0; k < m; ++k) {
      VecX ck(n);
      for (int v = 0; v < V; ++v)
        if (S.col[v] >= 0) ck(S.col[v]) = C(k, v);
      KiCt.col(k) = solver.solve(ck);
    }
    MatX CKC = MatX::Zero(m, m);
    for (int k = 0; k < m; ++k)
      for (int v = 0; v < V; ++v)
        if (S.col[v] >= 0) CKC.row(k) += C(k, v) * KiCt.row(S.col[v]);
    VecX rhs(m);
    for (int k = 0; k < m; ++k) rhs(k) = target[k] - p[k];
    const VecX lam = CKC.completeOrthogonalDecomposition().solve(rhs);
    const VecX hf = KiCt * lam;
    VecX h = VecX::Zero(V);
    for (int v = 0; v < V; ++v)
      if (S.col[v] >= 0) h(v) = hf(S.col[v]);
    L = hamiltonian_step(L, h, 1.0, conv, restore).immersion;
    p = residual_periods(L);
    rep.error_after = error(p);
    ++rep.iterations;
  }
  return rep;
}

}  // namespace leg
