#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "leg/corpus.hpp"
#include "leg/errors.hpp"
#include "leg/flow.hpp"
#include "leg/monotonicity.hpp"

using namespace leg;

namespace {

constexpr double kPi = std::numbers::pi;

const GaugeCheck& find_check(const std::vector<GaugeCheck>& cs, const std::string& name) {
  for (const auto& c : cs)
    if (c.name == name) return c;
  throw std::runtime_error("missing check " + name);
}

std::vector<double> geometric_radii(double hi, double lo, double q) {
  std::vector<double> r;
  for (double s = hi; s > lo; s *= q) r.push_back(s);
  return r;
}

DiscreteImmersion deformed_lift(int n) {
  const DiscreteImmersion C = clifford_lift(n);
  VecX h(C.num_vertices());
  for (int v = 0; v < C.num_vertices(); ++v) {
    const Vec2 st = C.mesh.uv[v];
    h(v) = 0.1 * std::cos(st(0) + 0.3) + 0.05 * std::sin(st(1) - st(0));
  }
  RestoreOptions ro;
  ro.tol = 0.0;
  ro.throw_on_failure = false;
  return hamiltonian_step(C, h, 1.0, ReebConvention::MinusTwo, ro).immersion;
}

}  // namespace

TEST(Cutoff, ShapeAndDerivatives) {
  EXPECT_EQ(cutoff(0.3), 1.0);
  EXPECT_EQ(cutoff(1.0), 1.0);
  EXPECT_EQ(cutoff(2.0), 0.0);
  EXPECT_EQ(cutoff(5.0), 0.0);
  EXPECT_DOUBLE_EQ(cutoff(1.5), 0.5);
  for (double t = 0.5; t <= 2.5; t += 0.01) {
    EXPECT_LE(cutoff_d1(t), 0.0);
    const double h = 1e-5;
    EXPECT_NEAR(cutoff_d1(t), (cutoff(t + h) - cutoff(t - h)) / (2 * h), 1e-8);
    EXPECT_NEAR(cutoff_d2(t), (cutoff_d1(t + h) - cutoff_d1(t - h)) / (2 * h), 1e-3);
  }
  for (double t = 1.25; t <= 1.75; t += 0.005) EXPECT_LT(cutoff_d1(t), -0.5);
  // C^2 at the junctions.
  EXPECT_NEAR(cutoff_d2(1.0 + 1e-9), 0.0, 1e-6);
  EXPECT_NEAR(cutoff_d2(2.0 - 1e-9), 0.0, 1e-6);
}

TEST(DensityWeight, BoundsAtEveryVertex) {
  const DiscreteImmersion L = clifford_lift(32);
  const GaugeFields G = gauge_fields(L, L.point(5));
  for (const auto& v : G.vertex) {
    if (v.singular) continue;
    const double w = density_weight(v.sigma);
    EXPECT_GE(w, 1.0);
    EXPECT_LE(w, kPi / 2.0);
  }
  EXPECT_DOUBLE_EQ(density_weight(0.0), 1.0);
  EXPECT_DOUBLE_EQ(density_weight(INFINITY), kPi / 2.0);
  EXPECT_NEAR(density_weight(1e8), kPi / 2.0, 1e-7);
}

TEST(GaugeFields, FlatPatchHasNoSlope) {
  const DiscreteImmersion L = flat_patch(16, 0.5);
  const GaugeFields G = gauge_fields(L, L.point(8 * 17 + 8));
  double c = 0.0;
  int singular = 0;
  for (const auto& v : G.vertex) {
    if (v.singular) {
      ++singular;
      continue;
    }
    if (v.r < 0.2) c = std::max(c, std::abs(v.sigma) / v.r);
  }
  EXPECT_EQ(singular, 1);
  EXPECT_LT(c, 1e-12);
  int invalid = 0;
  for (const auto& f : G.face) invalid += !f.valid;
  EXPECT_EQ(invalid, 6);
}

TEST(GaugeFields, ReebOffsetBaseSaturatesArctan) {
  const DiscreteImmersion L = flat_patch(8, 0.5);
  VecX up = L.point(4 * 9 + 4), down = up;
  up(0) -= 0.01;
  down(0) += 0.01;
  const auto a = gauge_fields(L, up).vertex[4 * 9 + 4];
  const auto b = gauge_fields(L, down).vertex[4 * 9 + 4];
  EXPECT_FALSE(a.singular);
  EXPECT_DOUBLE_EQ(a.arctan_sigma, kPi / 2.0);
  EXPECT_DOUBLE_EQ(b.arctan_sigma, -kPi / 2.0);
}

TEST(GaugeFields, CliffordArctanGradientBoundedNearBase) {
  // |d arctan sigma| stays O(1) near p0 on the lift, far below the 2 / r cap.
  std::vector<double> g;
  for (int n : {64, 128}) {
    const DiscreteImmersion L = clifford_lift(n);
    const GaugeFields G = gauge_fields(L, L.point(0));
    double m = 0.0;
    for (const auto& f : G.face)
      if (f.valid && f.r < 0.5 && f.r > 3.0 * mean_edge_length(L)) m = std::max(m, std::sqrt(f.norm2(f.d_arctan)));
    g.push_back(m);
  }
  EXPECT_LT(g[1], 3.0);
  EXPECT_NEAR(g[1] / g[0], 1.0, 0.2);
}

TEST(HamiltonianArctan, ValuesSupportAndErrors) {
  const Target T{TargetKind::Heisenberg};
  const VecX p0 = VecX::Zero(5);
  const double r = 0.3, eta = 0.05;
  const HamiltonianSpec hs = hamiltonian_arctan(T, p0, r, eta);
  // A point with r_gauge = 1.5 eta: rho^4 + 4 phi^2 = (1.5 eta)^4 with rho = phi-free part.
  const double rg = 1.5 * eta, rho = rg * std::pow(0.5, 0.25);
  const double phi = 0.5 * std::sqrt(std::pow(rg, 4) - std::pow(rho, 4));
  VecX q(5);
  q << phi, rho, 0.0, 0.0, 0.0;
  const GaugeFrame G = target_gauge(T, p0, q);
  ASSERT_NEAR(G.r_gauge, rg, 1e-14);
  EXPECT_NEAR(hs.h.value(q), G.arctan_sigma() * (1.0 - cutoff(1.5)), 1e-14);
  EXPECT_TRUE(hs.supported_at(q));
  VecX far = q;
  far(1) = 0.7;
  EXPECT_EQ(hs.h.value(far), 0.0);
  EXPECT_FALSE(hs.supported_at(far));
  EXPECT_EQ(hs.h.value(p0), 0.0);

  // Analytic gradient against central differences.
  VecX x(5);
  x << 0.004, 0.09, -0.05, 0.03, 0.02;
  const VecX g = hs.h.gradient(x);
  for (int i = 0; i < 5; ++i) {
    VecX a = x, b = x;
    a(i) += 1e-6;
    b(i) -= 1e-6;
    EXPECT_NEAR(g(i), (hs.h.value(a) - hs.h.value(b)) / 2e-6, 1e-5 * (1.0 + std::abs(g(i))));
  }
  EXPECT_THROW(hamiltonian_arctan(T, p0, 0.3, 0.3), DomainError);
  EXPECT_THROW(hamiltonian_arctan(T, p0, 0.3, 0.0), DomainError);
  EXPECT_THROW(hamiltonian_arctan(T, p0, 1.2, 0.1), DomainError);
}

TEST(MonotonicityBalance, FourteenSlots) {
  const DiscreteImmersion L = flat_patch(32, 0.75);
  const MonotonicityReport rep = monotonicity_balance(L, VecX::Zero(5), 0.3, 0.05);
  ASSERT_EQ(rep.terms.size(), 14u);
  std::set<std::string> names;
  int lhs = 0, rhs = 0, book = 0;
  double sl = 0.0, sr = 0.0;
  for (const auto& t : rep.terms) {
    names.insert(t.name);
    EXPECT_TRUE(std::isfinite(t.value));
    if (t.side == "lhs") ++lhs, sl += t.value;
    if (t.side == "rhs") ++rhs, sr += t.value;
    if (t.side == "bookkeeping") ++book;
  }
  EXPECT_EQ(names.size(), 14u);
  EXPECT_EQ(lhs, 5);
  EXPECT_EQ(rhs, 5);
  EXPECT_EQ(book, 4);
  EXPECT_DOUBLE_EQ(sl, rep.lhs);
  EXPECT_DOUBLE_EQ(sr, rep.rhs);
  EXPECT_GE(rep.annulus_faces, 100);
}

TEST(MonotonicityBalance, FlatPatchConsistencyOrder) {
  std::vector<double> res;
  for (int n : {32, 64, 128}) {
    const MonotonicityReport rep = monotonicity_balance(flat_patch(n, 0.75), VecX::Zero(5), 0.3, 0.05);
    // Both radial slots tend to 2 pi on a plane.
    EXPECT_NEAR(rep.terms[1].value, 2.0 * kPi, 0.05);
    res.push_back(rep.residual);
  }
  const double order = std::log2(res[0] / res[2]) / 2.0;
  EXPECT_GE(order, 0.8);
  EXPECT_LT(res[2], 0.02);
}

TEST(MonotonicityBalance, UnderResolvedAnnulusThrows) {
  EXPECT_THROW(monotonicity_balance(flat_patch(8, 0.75), VecX::Zero(5), 0.3, 0.05), ResolutionError);
}

TEST(MonotonicityBalance, PairingDirectAgainstChainRule) {
  // Direct <dh, dbeta> from vertex values of h versus the chain-rule assembly
  // from gauge differentials; the gap closes at second order.
  std::vector<double> gap;
  double direct = 0.0;
  for (int n : {64, 128}) {
    const DiscreteImmersion L = deformed_lift(n);
    VecX p0 = L.point(0);
    p0(0) += 0.01;
    const MonotonicityReport rep = monotonicity_balance(L, p0, 0.3, 0.05, 10);
    direct = rep.terms[0].value;
    gap.push_back(std::abs(direct - rep.pairing_assembled));
  }
  EXPECT_GT(std::abs(direct), 1e-3);
  EXPECT_GE(std::log2(gap[0] / gap[1]), 1.5);
}

TEST(GaugeChecks, ConstantsStableOnStiefelLift) {
  std::vector<std::vector<GaugeCheck>> runs;
  for (int n : {64, 128}) {
    const DiscreteImmersion L = clifford_lift(n, TargetKind::Stiefel);
    runs.push_back(gauge_checks(L, gauge_fields(L, L.point(0)), 3.0 * mean_edge_length(L), 0.5));
  }
  for (const char* name : {"structure", "horizontal_gradient", "perpendicular_gradient"}) {
    const double a = find_check(runs[0], name).constant, b = find_check(runs[1], name).constant;
    EXPECT_GT(find_check(runs[1], name).count, 100) << name;
    EXPECT_GT(a, 0.0) << name;
    EXPECT_NEAR(b / a, 1.0, 0.2) << name;
  }
  for (const auto& run : runs) EXPECT_LE(find_check(run, "arctan_gradient_cap").constant, 1.0);
}

TEST(GaugeChecks, HeisenbergDefectsAreDiscretisationOnly) {
  std::vector<double> perp;
  for (int n : {64, 128}) {
    const DiscreteImmersion L = clifford_lift(n);
    const auto cs = gauge_checks(L, gauge_fields(L, L.point(0)), 3.0 * mean_edge_length(L), 0.5);
    EXPECT_LT(find_check(cs, "horizontal_gradient").max_defect, 1e-12);
    EXPECT_LT(find_check(cs, "structure").max_defect, 1e-5);
    EXPECT_LE(find_check(cs, "arctan_gradient_cap").constant, 1.0);
    perp.push_back(find_check(cs, "perpendicular_gradient").max_defect);
  }
  EXPECT_LT(perp[1], 0.6 * perp[0]);
}

TEST(DensityCurve, FlatPatchAndDoubleSheet) {
  const std::vector<double> radii{0.4, 0.3, 0.2, 0.05};
  const DensityCurve one = density_curve(flat_patch(32, 0.5), VecX::Zero(5), radii);
  DoubleSheetOptions o;
  o.n = 32;
  const DensityCurve two = density_curve(double_sheet(o), VecX::Zero(5), radii);
  ASSERT_EQ(one.radii.size(), 3u);
  EXPECT_EQ(one.warnings.size(), 1u);
  for (size_t i = 0; i < one.radii.size(); ++i) {
    if (i > 0) EXPECT_LT(one.radii[i], one.radii[i - 1]);
    EXPECT_NEAR(one.ratios[i] / kPi, 1.0, 0.02);
    EXPECT_EQ(one.counts[i], 1);
    EXPECT_NEAR(two.ratios[i] / (2.0 * kPi), 1.0, 0.03);
    EXPECT_EQ(two.counts[i], 2);
  }
  EXPECT_THROW(density_curve(flat_patch(8, 0.5), VecX::Zero(5), {-0.1}), DomainError);
}

TEST(DensityKernel, UnitIntegral) {
  for (const auto& k : standard_kernels()) {
    const int n = 4000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += k(k.lo + (i + 0.5) * (k.hi - k.lo) / n);
    EXPECT_NEAR(s * (k.hi - k.lo) / n, 1.0, 1e-6) << k.name;
    EXPECT_EQ(k(k.lo), 0.0);
    EXPECT_EQ(k(k.hi), 0.0);
  }
  EXPECT_THROW(bump_kernel(0.0, 1.0, "bad"), DomainError);
}

TEST(Theta0, SheetCountAcrossKernels) {
  DoubleSheetOptions o;
  o.n = 32;
  const DiscreteImmersion one = flat_patch(32, 0.5), two = double_sheet(o);
  for (const auto& k : standard_kernels()) {
    const Theta0Estimate a = theta0_estimate(one, VecX::Zero(5), k);
    const Theta0Estimate b = theta0_estimate(two, VecX::Zero(5), k);
    EXPECT_NEAR(a.theta0 / (2.0 * kPi), 1.0, 0.03) << k.name;
    EXPECT_NEAR(b.theta0 / (2.0 * kPi), 2.0, 0.06) << k.name;
    EXPECT_EQ(a.multiplicity, 1);
    EXPECT_EQ(b.multiplicity, 2);
    EXPECT_LT(a.distance_to_integer, 0.03);
  }
}

TEST(QuasiMonotonicity, StableOnClifford) {
  std::vector<QuasiMonotonicity> q;
  for (int n : {128, 256}) {
    const DiscreteImmersion L = clifford_lift(n, TargetKind::Stiefel);
    q.push_back(quasi_monotonicity(density_curve(L, L.point(0), geometric_radii(0.5, 0.02, 0.85))));
  }
  for (const auto& x : q) {
    EXPECT_GT(x.lower, 0.0);
    EXPECT_LE(x.spike, 3.0);
  }
  EXPECT_NEAR(q[1].upper / q[0].upper, 1.0, 0.1);
  EXPECT_NEAR(q[1].lower / q[0].lower, 1.0, 0.1);
}

TEST(ReebRotation, ReportsInvariant) {
  DiscreteImmersion S = clifford_lift(24, TargetKind::Stiefel);
  const VecX p0 = S.point(3);
  DiscreteImmersion R = S;
  const double th = 0.7;
  for (int v = 0; v < R.num_vertices(); ++v) R.positions.row(v) = R.target.reeb_flow(R.point(v), th).transpose();
  const VecX p1 = R.target.reeb_flow(p0, th);
  const auto a = monotonicity_balance(S, p0, 0.3, 0.05, 10), b = monotonicity_balance(R, p1, 0.3, 0.05, 10);
  for (size_t i = 0; i < a.terms.size(); ++i) EXPECT_NEAR(a.terms[i].value, b.terms[i].value, 1e-10);
  const auto ca = density_curve(S, p0, {0.5, 0.4, 0.3}), cb = density_curve(R, p1, {0.5, 0.4, 0.3});
  for (size_t i = 0; i < ca.ratios.size(); ++i) {
    EXPECT_NEAR(ca.ratios[i], cb.ratios[i], 1e-10);
    EXPECT_EQ(ca.counts[i], cb.counts[i]);
  }
  const auto ta = theta0_estimate(S, p0, standard_kernels()[0]), tb = theta0_estimate(R, p1, standard_kernels()[0]);
  EXPECT_NEAR(ta.theta0, tb.theta0, 1e-10);
}
