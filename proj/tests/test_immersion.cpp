#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "leg/corpus.hpp"
#include "leg/energy.hpp"
#include "leg/errors.hpp"
#include "leg/immersion.hpp"

using namespace leg;

namespace {

constexpr double kPi = std::numbers::pi;

DiscreteImmersion warped_clifford(int n, TargetKind t = TargetKind::Heisenberg) {
  CliffordOptions o;
  o.n = n;
  o.target = t;
  o.warp = 0.3;
  return clifford_lift(o);
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Least-squares slope of log(err) against log(h).
double fitted_order(const std::vector<int>& ns, const std::vector<double>& err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(ns.size());
  for (size_t i = 0; i < ns.size(); ++i) {
    const double x = std::log(1.0 / ns[i]), y = std::log(err[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

// Same immersion with vertex labels permuted.
DiscreteImmersion relabel(const DiscreteImmersion& L, std::uint64_t seed) {
  std::vector<int> perm(L.num_vertices());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  SurfaceMesh m = L.mesh;
  MatX X(L.positions.rows(), L.positions.cols());
  for (int v = 0; v < L.num_vertices(); ++v) {
    X.row(perm[v]) = L.positions.row(v);
    if (m.has_uv()) m.uv[perm[v]] = L.mesh.uv[v];
  }
  for (auto& t : m.triangles)
    for (int& v : t) v = perm[v];
  for (auto& loop : m.boundary_loops)
    for (int& v : loop) v = perm[v];
  return DiscreteImmersion::create(std::move(m), L.target, std::move(X), L.legendrian_tol);
}

// Parameters swapped, triangles reversed to keep the orientation of the image.
DiscreteImmersion swap_parameters(const DiscreteImmersion& L) {
  SurfaceMesh m = L.mesh;
  for (auto& t : m.triangles) std::swap(t[1], t[2]);
  for (auto& uv : m.uv) uv = Vec2(uv(1), uv(0));
  std::swap(m.uv_period[0], m.uv_period[1]);
  for (auto& loop : m.boundary_loops) std::reverse(loop.begin(), loop.end());
  return DiscreteImmersion::create(std::move(m), L.target, L.positions, L.legendrian_tol);
}

std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST(FaceFrames, FlatUnitSquare) {
  const DiscreteImmersion L = flat_patch(1, 0.5);
  ASSERT_EQ(L.num_faces(), 2);
  const auto fr = face_frames(L);
  double area = 0.0;
  for (const FaceFrame& f : fr) {
    EXPECT_LT((f.g - Mat2::Identity()).norm(), 1e-15);
    EXPECT_NEAR(f.T.norm(), 1.0, 1e-12);
    EXPECT_NEAR(f.conformal_factor, 1.0, 1e-15);
    for (int k = 0; k < f.normal_basis.cols(); ++k) {
      EXPECT_LT(std::abs(f.normal_basis.col(k).dot(f.d1)), 1e-10);
      EXPECT_LT(std::abs(f.normal_basis.col(k).dot(f.d2)), 1e-10);
    }
    area += f.area;
  }
  EXPECT_NEAR(area, 1.0, 1e-15);
  EXPECT_NEAR(total_area(L), 1.0, 1e-15);
}

TEST(FaceFrames, InvariantsOnCorpus) {
  for (const DiscreteImmersion& L :
       {warped_clifford(16), warped_clifford(16, TargetKind::Stiefel), perturbed_clifford(16, 1e-2, 3)}) {
    for (const FaceFrame& f : face_frames(L)) {
      EXPECT_NEAR(f.T.norm(), 1.0, 1e-12);
      const MatX G = f.normal_basis.transpose() * f.normal_basis;
      EXPECT_LT((G - MatX::Identity(G.rows(), G.cols())).norm(), 1e-10);
    }
  }
}

TEST(FaceFrames, CliffordMetricIsFlatToSecondOrder) {
  std::vector<double> dev;
  for (int n : {32, 64, 128}) {
    double d = 0.0;
    for (const FaceFrame& f : face_frames(clifford_lift(n))) d = std::max(d, (f.g - Mat2::Identity()).norm());
    dev.push_back(d);
    const double h = 2 * kPi / n;
    EXPECT_LT(d, 0.5 * h * h);
  }
  EXPECT_NEAR(dev[1] / dev[2], 4.0, 0.1);
}

TEST(FaceFrames, CollapsedTriangleThrows) {
  DiscreteImmersion L = flat_patch(2, 0.5);
  MatX X = L.positions;
  const auto t = L.mesh.triangles[3];
  X.row(t[2]) = 0.5 * (X.row(t[0]) + X.row(t[1]));
  const DiscreteImmersion C = DiscreteImmersion::create(L.mesh, L.target, X, 1.0);
  try {
    face_frames(C);
    FAIL() << "expected DegeneracyError";
  } catch (const DegeneracyError& e) {
    EXPECT_EQ(e.index, 3);
  }
}

TEST(LegendrianResidual, FlatPatchIsExactlyZero) {
  const LegendrianResidual r = legendrian_residual(flat_patch(8, 0.5));
  EXPECT_EQ(r.max_abs, 0.0);
  EXPECT_EQ(r.rms, 0.0);
}

TEST(LegendrianResidual, CliffordMatchesClosedFormAndConverges) {
  std::vector<int> ns{16, 32, 64, 128};
  std::vector<double> err;
  for (int n : ns) {
    const LegendrianResidual r = legendrian_residual(clifford_lift(n));
    const double h = 2 * kPi / n;
    // Every edge of the analytic lift carries -h + sin h (one grid direction) or 0 (diagonal: -2h + 2 sin h).
    EXPECT_NEAR(r.max_abs, 2 * (h - std::sin(h)), 1e-12);
    err.push_back(r.max_abs);
  }
  EXPECT_GE(fitted_order(ns, err), 1.9);
}

TEST(LegendrianResidual, DetectsRandomPerturbation) {
  const DiscreteImmersion P = perturb_positions(clifford_lift(32), 1e-2, 11);
  EXPECT_GE(legendrian_residual(P).max_abs, 1e-3);
  const DiscreteImmersion S = perturb_positions(clifford_lift(32, TargetKind::Stiefel), 1e-2, 11);
  EXPECT_GE(legendrian_residual(S).max_abs, 1e-3);
}

TEST(SecondFundamentalForm, FlatPatchVanishes) {
  const DiscreteImmersion L = flat_patch(8, 0.5);
  const SecondFundamentalForm II = second_fundamental_form(L);
  for (int v = 0; v < L.num_vertices(); ++v) {
    EXPECT_LT(II.ii_norm2[v], 1e-16);
    EXPECT_LT(II.mean_curvature[v].norm(), 1e-8);
  }
}

TEST(SecondFundamentalForm, CliffordMeanCurvatureIsConstant) {
  // H = (u_ss + u_tt) / 2 = -u / 2, so |H| = 1/sqrt2 on the Clifford torus.
  const SecondFundamentalForm II = second_fundamental_form(warped_clifford(128));
  double lo = 1e9, hi = 0.0;
  for (const VecX& H : II.mean_curvature) lo = std::min(lo, H.norm()), hi = std::max(hi, H.norm());
  EXPECT_LT((hi - lo) / hi, 0.02);
  EXPECT_NEAR(hi, 1 / std::numbers::sqrt2, 0.01);
}

TEST(SecondFundamentalForm, ReebComponentVanishesUnderRefinement) {
  std::vector<int> ns{16, 32, 64};
  std::vector<double> err;
  for (int n : ns) err.push_back(max_abs(second_fundamental_form(warped_clifford(n)).reeb_component));
  EXPECT_GE(fitted_order(ns, err), 1.5);
}

TEST(SecondFundamentalForm, Valence3VertexUsesTwoRingFallback) {
  const DiscreteImmersion L = valence3_cone(4);
  const int c = valence3_vertex(L);
  EXPECT_EQ(L.topo.vertex_neighbors[c].size(), 3u);
  const auto fits = vertex_fits(L);
  EXPECT_TRUE(fits[c].two_ring);
  const SecondFundamentalForm II = second_fundamental_form(L, fits);
  EXPECT_NE(std::find(II.two_ring_vertices.begin(), II.two_ring_vertices.end(), c), II.two_ring_vertices.end());
  EXPECT_LT(II.mean_curvature[c].norm(), 1e-8);
}

TEST(HopfDifferential, Examples) {
  for (auto z : hopf_differential(flat_patch(4, 0.5))) EXPECT_LT(std::abs(z), 1e-15);
  FlatPatchOptions o;
  o.n = 4;
  o.stretch = 2.0;
  for (auto z : hopf_differential(flat_patch(o))) {
    EXPECT_NEAR(z.real(), 0.75, 1e-14);
    EXPECT_NEAR(z.imag(), 0.0, 1e-14);
  }
  DiscreteImmersion L = flat_patch(4, 0.5);
  L.mesh.uv.clear();
  EXPECT_THROW(hopf_differential(L), ValidationError);
}

TEST(HopfDifferential, CliffordDecays) {
  std::vector<int> ns{16, 32, 64, 128};
  std::vector<double> err;
  for (int n : ns) {
    double m = 0.0;
    for (auto z : hopf_differential(warped_clifford(n))) m = std::max(m, std::abs(z));
    err.push_back(m);
  }
  EXPECT_GE(fitted_order(ns, err), 1.0);
}

TEST(MeanCurvatureForm, FlatPatch) {
  const DiscreteImmersion L = flat_patch(6, 0.5);
  const MeanCurvatureForm m = mean_curvature_one_form(L, second_fundamental_form(L));
  EXPECT_LT(max_abs(m.gamma), 1e-8);
  const auto [lo, hi] = std::minmax_element(m.beta.begin(), m.beta.end());
  EXPECT_LT(*hi - *lo, 1e-8);
  EXPECT_TRUE(m.periods.empty());
}

TEST(MeanCurvatureForm, CliffordLagrangianAngle) {
  // dbeta = gamma / 2 integrates to (s + t) / 2 on the lift; periods (pi, pi).
  const int n = 64;
  const DiscreteImmersion L = warped_clifford(n);
  const MeanCurvatureForm m = mean_curvature_one_form(L, second_fundamental_form(L));
  ASSERT_EQ(m.periods.size(), 2u);
  for (double p : m.periods) EXPECT_NEAR(std::abs(p), kPi, 0.01);
  // Off the base point beta - (s + t)/2 stays constant along the BFS tree (no wrap crossings near v = 0).
  double dev = 0.0;
  for (int v = 0; v < L.num_vertices(); ++v) {
    const Vec2 uv = L.mesh.uv[v];
    if (uv(0) > kPi || uv(1) > kPi) continue;
    dev = std::max(dev, std::abs(m.beta[v] - m.beta[0] - 0.5 * (uv(0) + uv(1) - L.mesh.uv[0].sum())));
  }
  EXPECT_LT(dev, 0.01);
}

TEST(MeanCurvatureForm, CliffordResidualsDecay) {
  std::vector<int> ns{16, 32, 64, 128};
  std::vector<double> lap, curl;
  for (int n : ns) {
    const DiscreteImmersion L = warped_clifford(n);
    const MeanCurvatureForm m = mean_curvature_one_form(L, second_fundamental_form(L));
    lap.push_back(m.max_laplacian);
    curl.push_back(m.max_curl);
  }
  EXPECT_GE(fitted_order(ns, lap), 1.0);
  EXPECT_GE(fitted_order(ns, curl), 1.0);
}

TEST(Invariance, VertexRelabeling) {
  const DiscreteImmersion L = perturbed_clifford(16, 1e-2, 5);
  const DiscreteImmersion P = relabel(L, 99);
  EXPECT_NEAR(total_area(P), total_area(L), 1e-12);
  EXPECT_NEAR(energy(P, 0.3).total, energy(L, 0.3).total, 1e-11);
  EXPECT_NEAR(legendrian_residual(P).max_abs, legendrian_residual(L).max_abs, 1e-15);
  const auto a = sorted(face_areas(L)), b = sorted(face_areas(P));
  for (size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-14);
  std::vector<double> ha, hb;
  for (const VecX& H : second_fundamental_form(L).mean_curvature) ha.push_back(H.norm());
  for (const VecX& H : second_fundamental_form(P).mean_curvature) hb.push_back(H.norm());
  ha = sorted(ha), hb = sorted(hb);
  for (size_t i = 0; i < ha.size(); ++i) EXPECT_NEAR(ha[i], hb[i], 1e-9);
}

TEST(Invariance, ParameterSwap) {
  const DiscreteImmersion L = warped_clifford(16);
  const DiscreteImmersion S = swap_parameters(L);
  EXPECT_NEAR(total_area(S), total_area(L), 1e-12);
  EXPECT_NEAR(energy(S, 0.3).total, energy(L, 0.3).total, 1e-11);
  const auto za = hopf_differential(L), zb = hopf_differential(S);
  std::vector<double> ma, mb;
  for (auto z : za) ma.push_back(std::abs(z));
  for (auto z : zb) mb.push_back(std::abs(z));
  ma = sorted(ma), mb = sorted(mb);
  for (size_t i = 0; i < ma.size(); ++i) EXPECT_NEAR(ma[i], mb[i], 1e-12);
  const SecondFundamentalForm A = second_fundamental_form(L), B = second_fundamental_form(S);
  for (int v = 0; v < L.num_vertices(); ++v) EXPECT_NEAR(A.mean_curvature[v].norm(), B.mean_curvature[v].norm(), 1e-9);
}

TEST(AreaDirichlet, InequalityAndEqualityCase) {
  FlatPatchOptions stretched;
  stretched.n = 6;
  stretched.stretch = 1.5;
  for (const DiscreteImmersion& L : {flat_patch(6, 0.5), flat_patch(stretched), warped_clifford(32),
                                     warped_clifford(32, TargetKind::Stiefel), perturbed_clifford(16, 1e-2, 1)}) {
    const double D = dirichlet_energy(L), A = total_area(L);
    EXPECT_GE(D, A - 1e-12);
    double hopf = 0.0;
    for (auto z : hopf_differential(L)) hopf = std::max(hopf, std::abs(z));
    EXPECT_EQ(std::abs(D - A) <= 1e-6, hopf <= 1e-6) << "D - A = " << D - A << ", hopf " << hopf;
  }
}

TEST(MeshTopology, ValidatesGenusAndOrientation) {
  SurfaceMesh m = grid_mesh(4, 4, true, true);
  EXPECT_EQ(MeshTopology::build(m).euler_characteristic, 0);
  m.genus = 2;
  EXPECT_THROW(MeshTopology::build(m), ValidationError);
  SurfaceMesh flipped = grid_mesh(3, 3, false, false);
  std::swap(flipped.triangles[0][1], flipped.triangles[0][2]);
  EXPECT_THROW(MeshTopology::build(flipped), ValidationError);
}
