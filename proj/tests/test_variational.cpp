#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "leg/corpus.hpp"
#include "leg/energy.hpp"
#include "leg/errors.hpp"
#include "leg/flow.hpp"
#include "leg/hamiltonian.hpp"

using namespace leg;

namespace {

constexpr double kPi = std::numbers::pi;

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a, sy += b, sxx += a * a, sxy += a * b;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

// Smooth random field: low Fourier modes of the parameters in every coordinate.
MatX smooth_field(const DiscreteImmersion& L, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  const int D = L.target.dim();
  MatX c(D, 6);
  for (int i = 0; i < c.size(); ++i) c(i) = N(rng);
  MatX w(L.num_vertices(), D);
  for (int v = 0; v < L.num_vertices(); ++v) {
    const Vec2 uv = L.mesh.uv[v];
    Eigen::Matrix<double, 6, 1> b;
    b << 1.0, std::cos(uv(0)), std::sin(uv(0)), std::cos(uv(1)), std::sin(uv(1)), std::cos(uv(0) + uv(1));
    w.row(v) = (c * b).transpose();
  }
  return project_tangent(L, w);
}

double fd_energy(const DiscreteImmersion& L, const MatX& w, double eps, double t) {
  return (energy(displace(L, w, t), eps).total - energy(displace(L, w, -t), eps).total) / (2 * t);
}

double richardson(const DiscreteImmersion& L, const MatX& w, double eps) {
  const double f1 = fd_energy(L, w, eps, 1e-3), f2 = fd_energy(L, w, eps, 1e-4);
  return (100 * f2 - f1) / 99;
}

double alpha_raw(const Target& t, const VecX& q, const VecX& X) {
  if (t.kind == TargetKind::Heisenberg) return -X(0) + jmul(q.tail<4>()).dot(X.tail<4>());
  return q.head<4>().dot(X.tail<4>()) - q.tail<4>().dot(X.head<4>());
}

// Unitary-type field: generated by a quadratic Hamiltonian, exact contactomorphism flow.
ScalarField quadratic_hamiltonian(const Target& t, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  if (t.kind == TargetKind::Heisenberg) {
    Eigen::Matrix4d S;
    for (int i = 0; i < 16; ++i) S(i) = N(rng);
    S = (S + S.transpose()).eval() / 2;
    return {[S](const VecX& x) { return 0.5 * x.tail<4>().dot(S * x.tail<4>()); },
            [S](const VecX& x) {
              VecX g = VecX::Zero(5);
              g.tail<4>() = S * x.tail<4>();
              return g;
            },
            {}};
  }
  Eigen::Matrix4d A;
  for (int i = 0; i < 16; ++i) A(i) = N(rng);
  A = (A - A.transpose()).eval() / 2;
  // h(a, b) = a . A b (restricted to V2 this is alpha of (Aa, Ab) up to a constant)
  return {[A](const VecX& x) { return x.head<4>().dot(A * x.tail<4>()); },
          [A](const VecX& x) {
            VecX g(8);
            g << A * x.tail<4>(), A.transpose() * x.head<4>();
            return g;
          },
          {}};
}

}  // namespace

TEST(Energy, FlatUnitPatch) {
  const EnergyBreakdown E = energy(flat_patch(1, 0.5), 0.1);
  EXPECT_NEAR(E.area, 1.0, 1e-15);
  EXPECT_NEAR(E.penalty, 1e-4, 1e-18);
  EXPECT_NEAR(E.total, 1.0001, 1e-14);
  EXPECT_NEAR(E.entropy_indicator, 1e-4 * std::log(10.0), 1e-17);
  EXPECT_THROW(energy(flat_patch(1, 0.5), 0.0), DomainError);
}

TEST(Energy, CliffordAreaConverges) {
  const double exact = 4 * kPi * kPi;
  for (TargetKind t : {TargetKind::Heisenberg, TargetKind::Stiefel}) {
    const EnergyBreakdown E = energy(clifford_lift(128, t), 0.2);
    EXPECT_LT(std::abs(E.area - exact) / exact, 0.005);
  }
}

TEST(Energy, SplitSquareGaussMapCalibration) {
  // |dT|^2 = 2 on the Clifford torus; the split-square stencil reads 3/2 of it.
  for (int n : {16, 64}) {
    const double h2 = std::pow(2 * kPi / n, 2);
    for (double q : gauss_map_density(clifford_lift(n, TargetKind::Stiefel))) EXPECT_NEAR(q, 3.0, 0.1 * h2);
    for (double q : gauss_map_density(clifford_lift(n))) EXPECT_NEAR(q, 3.0, 0.1 * h2);
  }
}

TEST(Energy, BreakdownInvariants) {
  const DiscreteImmersion L = perturbed_clifford(16, 1e-2, 2);
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {0.5, 0.2, 0.1, 0.05, 0.01}) {
    const EnergyBreakdown E = energy(L, eps);
    EXPECT_DOUBLE_EQ(E.total, E.area + E.penalty);
    EXPECT_GE(E.penalty, std::pow(eps, 4) * E.area);
    EXPECT_LT(E.total, prev);
    EXPECT_GT(E.total, E.area);
    prev = E.total;
  }
}

TEST(FirstVariation, FlatPatchInteriorGradientVanishes) {
  const DiscreteImmersion L = flat_patch(8, 0.5);
  const FirstVariation G = gradient(L, 0.1);
  for (int v = 0; v < L.num_vertices(); ++v)
    if (!L.topo.boundary_vertex[v]) EXPECT_LT(G.covector.row(v).norm(), 1e-13);
}

TEST(FirstVariation, AreaMatchesFiniteDifferencesOnPatch) {
  FlatPatchOptions o;
  o.n = 10;
  const DiscreteImmersion flat = flat_patch(o);
  const DiscreteImmersion L = perturb_positions(flat, 2e-2, 4);
  // Interior bump times a coordinate direction.
  for (int d = 0; d < 5; ++d) {
    MatX w = MatX::Zero(L.num_vertices(), 5);
    for (int v = 0; v < L.num_vertices(); ++v) {
      const double r2 = L.mesh.uv[v].squaredNorm() / 0.16;
      if (r2 < 1.0) w(v, d) = std::pow(1 - r2, 4);
    }
    // eps -> 0 leaves the area term.
    const double an = first_variation(L, 1e-8, w);
    auto fd = [&](double t) { return (total_area(displace(L, w, t)) - total_area(displace(L, w, -t))) / (2 * t); };
    const double rich = (100 * fd(1e-4) - fd(1e-3)) / 99;
    EXPECT_NEAR(an, rich, 1e-6 * std::abs(rich)) << "direction " << d;
    // On the exact plane the first variation of area is zero.
    EXPECT_LT(std::abs(first_variation(flat, 1e-8, w)), 1e-12);
  }
}

TEST(FirstVariation, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(20);
  int checked = 0;
  for (TargetKind t : {TargetKind::Heisenberg, TargetKind::Stiefel}) {
    CliffordOptions o;
    o.n = 32;
    o.target = t;
    o.warp = 0.2;
    const DiscreteImmersion base = clifford_lift(o);
    for (int k = 0; k < 10; ++k) {
      const DiscreteImmersion L = perturb_positions(base, 1e-3, 100 + k);
      const MatX w = smooth_field(L, rng);
      const double eps = k % 2 ? 0.2 : 0.05;
      const FirstVariation G = gradient(L, eps);
      const double an = G.pair(w);
      EXPECT_NEAR(first_variation(L, eps, w), an, 1e-10 * std::abs(an));
      const double rich = richardson(L, w, eps);
      EXPECT_NEAR(an, rich, 1e-5 * std::abs(rich));
      ++checked;
    }
  }
  EXPECT_EQ(checked, 20);
}

TEST(FirstVariation, ReebRotationIsAnIsometry) {
  const DiscreteImmersion L = perturb_positions(clifford_lift(16, TargetKind::Stiefel), 1e-2, 3);
  MatX w(L.num_vertices(), 8);
  for (int v = 0; v < L.num_vertices(); ++v) w.row(v) = L.target.reeb(L.point(v)).transpose();
  for (double eps : {0.3, 0.1}) {
    const double E0 = energy(L, eps).total;
    EXPECT_LT(std::abs(gradient(L, eps).pair(w)), 1e-8 * E0);
    DiscreteImmersion R = L;
    for (int v = 0; v < L.num_vertices(); ++v) R.positions.row(v) = L.target.reeb_flow(L.point(v), 0.7).transpose();
    EXPECT_NEAR(energy(R, eps).total, E0, 1e-10 * E0);
  }
}

TEST(HamiltonianDeformation, Examples) {
  const DiscreteImmersion S = clifford_lift(8, TargetKind::Stiefel);
  HamiltonianSpec zero{constant_field(0.0)};
  EXPECT_EQ(hamiltonian_deformation(S, zero).norm(), 0.0);
  HamiltonianSpec one{constant_field(1.0)};
  const MatX w = hamiltonian_deformation(S, one);
  for (int v = 0; v < S.num_vertices(); ++v) {
    const VecX R = S.target.reeb(S.point(v));
    EXPECT_LT((w.row(v).transpose() + 2 * R).norm(), 1e-15);
    // Flowing -2R for time t is the Reeb rotation by -2t.
    const VecX moved = S.target.reeb_flow(S.point(v), -0.2);
    const VecX q = S.point(v);
    Vec8 expect;
    expect << std::cos(-0.2) * q.head<4>() + std::sin(-0.2) * q.tail<4>(), -std::sin(-0.2) * q.head<4>() + std::cos(-0.2) * q.tail<4>();
    EXPECT_LT((moved - expect).norm(), 1e-15);
  }
  const DiscreteImmersion H = clifford_lift(8);
  HamiltonianSpec dil{coordinate_field(5, 0, -1.0)};
  const MatX wd = hamiltonian_deformation(H, dil);
  for (int v = 0; v < H.num_vertices(); ++v) {
    const VecX q = H.point(v);
    VecX expect(5);
    expect << 2 * q(0), q.tail<4>();
    EXPECT_LT((wd.row(v).transpose() - expect).norm(), 1e-14);
  }
}

TEST(HamiltonianDeformation, TangentToTarget) {
  std::mt19937_64 rng(7);
  const DiscreteImmersion S = perturbed_clifford(8, 1e-2, 1);
  const DiscreteImmersion L = perturb_positions(clifford_lift(8, TargetKind::Stiefel), 1e-2, 1);
  for (int k = 0; k < 5; ++k) {
    const Polynomial p = random_polynomial(8, 3, rng);
    const MatX w = hamiltonian_deformation(L, HamiltonianSpec{p.field()});
    for (int v = 0; v < L.num_vertices(); ++v) {
      const VecX x = w.row(v).transpose();
      EXPECT_LT((L.target.tangent_project(L.point(v), x) - x).norm(), 1e-10 * (1 + x.norm()));
    }
  }
  (void)S;
}

class ContactContract : public ::testing::TestWithParam<std::tuple<TargetKind, ReebConvention>> {};

TEST_P(ContactContract, RandomPolynomialFieldsPreserveTheContactStructure) {
  const auto [kind, conv] = GetParam();
  const Target t{kind, 0.0};
  std::mt19937_64 rng(8);
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const Polynomial p = random_polynomial(t.dim(), 3, rng);
    const ScalarField h = p.field();
    const VecX q = random_point(t, rng);
    const VecX X = random_horizontal(t, q, rng);
    ASSERT_LT(std::abs(alpha_raw(t, q, X)), 1e-12);
    auto Y = [&](const VecX& x) { return t.hamiltonian_field(h, x, conv); };
    const double s = 1e-4;
    const VecX DYX = (Y(t.retract(q + s * X)) - Y(t.retract(q - s * X))) / (2 * s);
    const VecX y = Y(q);
    const double lie = (alpha_raw(t, q + s * y, X + s * DYX) - alpha_raw(t, q - s * y, X - s * DYX)) / (2 * s);
    worst = std::max(worst, std::abs(lie) / (p.coefficient_norm() * std::pow(1 + q.norm(), 3)));
  }
  EXPECT_LT(worst, 1e-4);
}

INSTANTIATE_TEST_SUITE_P(Targets, ContactContract,
                         ::testing::Combine(::testing::Values(TargetKind::Heisenberg, TargetKind::Stiefel),
                                            ::testing::Values(ReebConvention::MinusTwo, ReebConvention::Half)));

TEST(FirstOrderViolation, SeparatesContactFromGenericFields) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> N;
  const std::vector<double> taus{1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  for (TargetKind kind : {TargetKind::Heisenberg, TargetKind::Stiefel}) {
    const Target t{kind, 0.0};
    for (int k = 0; k < 20; ++k) {
      const VecX q = random_point(t, rng);
      const VecX X = random_horizontal(t, q, rng);
      const Polynomial p = random_polynomial(t.dim(), 3, rng);
      const VectorField Yh = hamiltonian_vector_field(t, p.field(), ReebConvention::MinusTwo);
      MatX B(t.dim(), t.dim());
      for (int i = 0; i < B.size(); ++i) B(i) = N(rng);
      const VectorField Yg = [&t, B](const VecX& x) { return t.tangent_project(x, B * x); };
      std::vector<double> vh, vg;
      for (double tau : taus) {
        vh.push_back(first_order_violation(t, Yh, q, X, tau) + 1e-300);
        vg.push_back(first_order_violation(t, Yg, q, X, tau));
      }
      EXPECT_GE(slope(taus, vh), 1.9);
      EXPECT_NEAR(slope(taus, vg), 1.0, 0.2);
    }
  }
}

TEST(FlowStep, ZeroFieldLeavesImmersionUnchanged) {
  for (const DiscreteImmersion& L : {clifford_lift(8), clifford_lift(8, TargetKind::Stiefel)}) {
    DiscreteImmersion M = L;
    set_legendrian_tol_from_restoration(M);
    const FlowStepResult r = flow_step(M, MatX::Zero(L.num_vertices(), L.target.dim()), 0.1);
    EXPECT_LT((r.immersion.positions - M.positions).norm(), 1e-14);
    EXPECT_EQ(r.restore.iterations, 0);
  }
  EXPECT_THROW(flow_step(clifford_lift(8), MatX::Zero(64, 5), 0.0), DomainError);
}

TEST(FlowStep, QuadraticHamiltonianResidualGrowsQuadratically) {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> N;
  const std::vector<double> taus{1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  for (TargetKind kind : {TargetKind::Heisenberg, TargetKind::Stiefel}) {
    CliffordOptions o;
    o.n = 32;
    o.target = kind;
    o.warp = 0.2;
    const DiscreteImmersion L = clifford_lift(o);
    const LegendrianResidual r0 = legendrian_residual(L);
    const MatX wh = hamiltonian_deformation(L, HamiltonianSpec{quadratic_hamiltonian(L.target, rng)});
    MatX B(L.target.dim(), L.target.dim());
    for (int i = 0; i < B.size(); ++i) B(i) = N(rng);
    MatX wg(L.num_vertices(), L.target.dim());
    for (int v = 0; v < L.num_vertices(); ++v) wg.row(v) = (B * L.point(v)).transpose();
    wg = project_tangent(L, wg);
    auto growth = [&](const MatX& w, double tau) {
      const LegendrianResidual r = legendrian_residual(displace(L, w, tau));
      double g = 0.0;
      for (size_t e = 0; e < r.edge.size(); ++e) g = std::max(g, std::abs(r.edge[e] - r0.edge[e]));
      return g;
    };
    std::vector<double> gh, gg;
    for (double tau : taus) gh.push_back(growth(wh, tau)), gg.push_back(growth(wg, tau));
    EXPECT_GE(slope(taus, gh), 1.9) << to_string(kind);
    EXPECT_NEAR(slope(taus, gg), 1.0, 0.1) << to_string(kind);
  }
}

TEST(Restoration, HeisenbergIsSolvedInOneStep) {
  DiscreteImmersion L = perturb_positions(clifford_lift(16), 1e-3, 5);
  const double floor = restorable_residual(L);
  RestoreOptions opt;
  opt.tol = 0.0;
  opt.max_iters = 1;
  opt.throw_on_failure = false;
  const RestoreReport r = restore_legendrian(L, opt);
  EXPECT_NEAR(r.residual_after, floor, 1e-12);
  EXPECT_GT(r.residual_before, r.residual_after);
  // A second pass does not improve the least-squares optimum.
  const RestoreReport r2 = restore_legendrian(L, opt);
  EXPECT_NEAR(r2.residual_after, floor, 1e-12);
}

TEST(Restoration, ReebShiftsAreUndone) {
  // Random per-vertex Reeb motions only change the solved variables.
  for (TargetKind kind : {TargetKind::Heisenberg, TargetKind::Stiefel}) {
    DiscreteImmersion L = clifford_lift(16, kind);
    const double floor = restorable_residual(L);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> U(-1e-3, 1e-3);
    DiscreteImmersion M = L;
    for (int v = 0; v < L.num_vertices(); ++v) M.positions.row(v) = L.target.reeb_flow(L.point(v), U(rng)).transpose();
    RestoreOptions opt;
    opt.tol = floor * (1 + 1e-6) + 1e-15;
    const RestoreReport r = restore_legendrian(M, opt);
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.iterations, 5);
  }
}

TEST(Restoration, FailureIsReported) {
  DiscreteImmersion L = perturb_positions(clifford_lift(16), 1e-2, 5);
  RestoreOptions opt;
  opt.tol = 1e-16;
  EXPECT_THROW(restore_legendrian(L, opt), StepRejected);
  opt.throw_on_failure = false;
  const RestoreReport r = restore_legendrian(L, opt);
  EXPECT_FALSE(r.converged);
}

TEST(Restoration, BoundaryVerticesStayFixed) {
  DiscreteImmersion L = perturb_positions(flat_patch(6, 0.5), 1e-3, 8);
  const MatX before = L.positions;
  RestoreOptions opt;
  opt.tol = 0.0;
  opt.throw_on_failure = false;
  restore_legendrian(L, opt);
  for (int v = 0; v < L.num_vertices(); ++v)
    if (L.topo.boundary_vertex[v]) EXPECT_EQ((L.positions.row(v) - before.row(v)).norm(), 0.0);
}
