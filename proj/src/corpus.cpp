#include "leg/corpus.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "leg/errors.hpp"
#include "leg/flow.hpp"

namespace leg {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

SurfaceMesh grid_mesh(int n1, int n2, bool periodic1, bool periodic2) {
  if (n1 < 1 || n2 < 1) throw ValidationError("grid needs at least one cell per direction");
  if ((periodic1 && n1 < 3) || (periodic2 && n2 < 3)) throw ValidationError("periodic grid needs n >= 3");
  const int m1 = periodic1 ? n1 : n1 + 1;
  const int m2 = periodic2 ? n2 : n2 + 1;
  SurfaceMesh mesh;
  mesh.num_vertices = m1 * m2;
  auto id = [&](int i, int j) { return (i % m1) * m2 + (j % m2); };
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      const int v00 = id(i, j), v10 = id(i + 1, j), v11 = id(i + 1, j + 1), v01 = id(i, j + 1);
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  const int periodic = (periodic1 ? 1 : 0) + (periodic2 ? 1 : 0);
  mesh.genus = periodic == 2 ? 1 : 0;
  return mesh;
}

DiscreteImmersion flat_patch(const FlatPatchOptions& opt) {
  SurfaceMesh mesh = grid_mesh(opt.n, opt.n, false, false);
  const int m = opt.n + 1;
  MatX X(mesh.num_vertices, 5);
  mesh.uv.resize(mesh.num_vertices);
  const double c = std::cos(opt.rotation), s = std::sin(opt.rotation);
  const double h = 2.0 * opt.half_width / opt.n;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double x1 = opt.center(0) - opt.half_width + i * h;
      const double x2 = opt.center(1) - opt.half_width + j * h;
      const int v = i * m + j;
      mesh.uv[v] = Vec2(x1, x2);
      const double a = opt.stretch * x1;
      X.row(v) << opt.phi_offset, c * a, s * a, c * x2, s * x2;
    }
  return DiscreteImmersion::create(std::move(mesh), Target{TargetKind::Heisenberg, 0.0}, std::move(X), 1e-12);
}

DiscreteImmersion flat_patch(int n, double half_width) {
  FlatPatchOptions o;
  o.n = n;
  o.half_width = half_width;
  return flat_patch(o);
}

LagrangianSampleGrid clifford_grid(int n) {
  LagrangianSampleGrid g;
  g.n1 = g.n2 = n;
  g.h1 = g.h2 = kTwoPi / n;
  g.periodic = {true, true};
  g.u.resize(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double s = i * g.h1, t = j * g.h2;
      g.u[static_cast<size_t>(i) * n + j] = Vec4(std::cos(s), std::sin(s), std::cos(t), std::sin(t));
    }
  return g;
}

LagrangianSampleGrid graph_grid(int n) {
  LagrangianSampleGrid g;
  g.n1 = g.n2 = n;
  g.h1 = g.h2 = 1.0 / n;
  g.u.resize(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g.u[static_cast<size_t>(i) * n + j] = Vec4(i * g.h1, j * g.h2, 0.0, 0.0);
  return g;
}

DiscreteImmersion clifford_lift(const CliffordOptions& opt) {
  const int n = opt.n;
  SurfaceMesh mesh = grid_mesh(n, n, true, true);
  mesh.uv.resize(mesh.num_vertices);
  mesh.uv_period = {kTwoPi, kTwoPi};
  const int D = opt.target == TargetKind::Stiefel ? 8 : 5;
  MatX X(mesh.num_vertices, D);
  std::vector<double> trap_phi;
  double phi_period = kTwoPi;
  if (opt.target == TargetKind::Heisenberg && opt.lift == LiftMethod::Trapezoid) {
    if (opt.warp != 0.0) throw ValidationError("trapezoid lift needs an unwarped grid");
    const LiftResult lr = legendrian_lift(clifford_grid(n), 0.0);
    trap_phi = lr.phi;
    phi_period = *lr.periods[0];
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double sig = kTwoPi * i / n;
      const double s = sig + opt.warp * std::sin(sig);
      const double t = kTwoPi * j / n;
      const int v = i * n + j;
      mesh.uv[v] = Vec2(s, t);
      if (opt.target == TargetKind::Heisenberg) {
        const double phi = trap_phi.empty() ? reduce_period(s + t, phi_period) : trap_phi[v];
        X.row(v) << phi, std::cos(s), std::sin(s), std::cos(t), std::sin(t);
      } else {
        const double k = 1.0 / std::numbers::sqrt2;
        X.row(v) << k * std::cos(s), k * std::sin(s), k * std::cos(t), k * std::sin(t), k * std::cos(s),
            k * std::sin(s), -k * std::cos(t), -k * std::sin(t);
      }
    }
  Target target{opt.target, opt.target == TargetKind::Heisenberg ? phi_period : 0.0};
  DiscreteImmersion L = DiscreteImmersion::create(std::move(mesh), target, std::move(X), 1e-12);
  set_legendrian_tol_from_restoration(L);
  return L;
}

DiscreteImmersion clifford_lift(int n, TargetKind target) {
  CliffordOptions o;
  o.n = n;
  o.target = target;
  return clifford_lift(o);
}

void set_legendrian_tol_from_restoration(DiscreteImmersion& L, double factor) {
  L.legendrian_tol = std::max(factor * restorable_residual(L), 1e-12);
}

DiscreteImmersion perturbed_clifford(int n, double amplitude, std::uint64_t seed, double warp) {
  CliffordOptions o;
  o.n = n;
  o.warp = warp;
  DiscreteImmersion L = clifford_lift(o);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, kTwoPi);
  std::normal_distribution<double> N(0.0, 1.0);
  // Random combination of low Fourier modes in (s, t), zero mean.
  struct Mode {
    int a, b;
    double ph, c;
  };
  std::vector<Mode> modes;
  for (int a = 0; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b) {
      if (a == 0 && b <= 0) continue;
      modes.push_back({a, b, U(rng), N(rng)});
    }
  double norm = 0.0;
  for (const auto& m : modes) norm += m.c * m.c;
  norm = std::sqrt(norm);
  VecX h(L.num_vertices());
  for (int v = 0; v < L.num_vertices(); ++v) {
    const Vec2 st = L.mesh.uv[v];
    double s = 0.0;
    for (const auto& m : modes) s += m.c / norm * std::cos(m.a * st(0) + m.b * st(1) + m.ph);
    h(v) = amplitude * s;
  }
  RestoreOptions ro;
  ro.throw_on_failure = false;
  ro.tol = 0.0;
  DiscreteImmersion out = hamiltonian_step(L, h, 1.0, ReebConvention::MinusTwo, ro).immersion;
  // Keep the residual periods of the unperturbed lift.
  restore_periods(out, residual_periods(L), ReebConvention::MinusTwo, ro);
  return out;
}

DiscreteImmersion double_sheet(const DoubleSheetOptions& opt) {
  FlatPatchOptions a;
  a.n = opt.n;
  a.half_width = opt.half_width;
  FlatPatchOptions b = a;
  b.rotation = opt.rotation;
  b.phi_offset = opt.phi_separation;
  const DiscreteImmersion A = flat_patch(a), B = flat_patch(b);
  SurfaceMesh mesh = A.mesh;
  const int off = A.num_vertices();
  mesh.num_vertices += B.num_vertices();
  for (auto t : B.mesh.triangles) mesh.triangles.push_back({t[0] + off, t[1] + off, t[2] + off});
  mesh.uv.insert(mesh.uv.end(), B.mesh.uv.begin(), B.mesh.uv.end());
  MatX X(mesh.num_vertices, 5);
  X << A.positions, B.positions;
  return DiscreteImmersion::create(std::move(mesh), A.target, std::move(X), 1e-12);
}

DiscreteImmersion valence3_cone(int n) {
  DiscreteImmersion P = flat_patch(n, 0.5);
  SurfaceMesh mesh = P.mesh;
  // Split the face nearest the patch center.
  const int f = static_cast<int>(mesh.triangles.size()) / 2;
  const auto t = mesh.triangles[f];
  const int c = mesh.num_vertices++;
  mesh.uv.push_back((mesh.uv[t[0]] + mesh.uv[t[1]] + mesh.uv[t[2]]) / 3.0);
  mesh.triangles[f] = {t[0], t[1], c};
  mesh.triangles.push_back({t[1], t[2], c});
  mesh.triangles.push_back({t[2], t[0], c});
  MatX X(mesh.num_vertices, 5);
  X.topRows(P.num_vertices()) = P.positions;
  X.row(c) = (P.positions.row(t[0]) + P.positions.row(t[1]) + P.positions.row(t[2])) / 3.0;
  return DiscreteImmersion::create(std::move(mesh), P.target, std::move(X), 1e-12);
}

int valence3_vertex(const DiscreteImmersion& L) { return L.num_vertices() - 1; }

DiscreteImmersion perturb_positions(const DiscreteImmersion& L, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  MatX w(L.num_vertices(), L.target.dim());
  for (int v = 0; v < w.rows(); ++v)
    for (int d = 0; d < w.cols(); ++d) w(v, d) = U(rng);
  return displace(L, w, amplitude);
}

DiscreteImmersion generate(const std::string& family, int n, double amplitude, std::uint64_t seed) {
  if (family == "flat_patch") return flat_patch(n, 0.5);
  if (family == "clifford_lift") return clifford_lift(n);
  if (family == "stiefel_clifford") return clifford_lift(n, TargetKind::Stiefel);
  if (family == "perturbed_clifford") return perturbed_clifford(n, amplitude, seed);
  if (family == "double_sheet") {
    DoubleSheetOptions o;
    o.n = n;
    return double_sheet(o);
  }
  if (family == "reeb_orbit_tube_excluded") return valence3_cone(std::max(n, 2));
  throw ValidationError("unknown corpus family '" + family + "'");
}

}  // namespace leg
