#include "leg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "leg/corpus.hpp"
#include "leg/errors.hpp"
#include "leg/hamiltonian.hpp"
#include "leg/stationarity.hpp"

namespace leg {

double fitted_order(const std::vector<int>& ns, const std::vector<double>& err) {
  if (ns.size() != err.size() || ns.size() < 2) throw ValidationError("fitted_order needs >= 2 matching samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(ns.size());
  for (size_t i = 0; i < ns.size(); ++i) {
    const double x = std::log(1.0 / ns[i]), y = std::log(std::abs(err[i]));
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

std::vector<double> geometric_radii(double hi, double lo, double q) {
  if (!(q > 0.0 && q < 1.0) || !(lo > 0.0)) throw ValidationError("geometric_radii needs 0 < q < 1 and lo > 0");
  std::vector<double> r;
  for (double s = hi; s > lo; s *= q) r.push_back(s);
  return r;
}

DiscreteImmersion lift_immersion(const LagrangianSampleGrid& g, const LiftResult& lift) {
  const int m1 = g.periodic[0] ? g.n1 : g.n1 - 1;
  const int m2 = g.periodic[1] ? g.n2 : g.n2 - 1;
  SurfaceMesh mesh = grid_mesh(m1, m2, g.periodic[0], g.periodic[1]);
  mesh.uv.resize(mesh.num_vertices);
  mesh.uv_period = {g.periodic[0] ? g.n1 * g.h1 : 0.0, g.periodic[1] ? g.n2 * g.h2 : 0.0};
  double period = 0.0;
  for (const auto& p : lift.periods) {
    if (!p || std::abs(*p) < 1e-12) continue;
    if (period == 0.0) {
      period = std::abs(*p);
    } else {
      const double k = std::abs(*p) / period;
      if (std::abs(k - std::round(k)) > 1e-6) throw ValidationError("lift periods are not commensurable");
    }
  }
  MatX X(mesh.num_vertices, 5);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      const int v = i * g.n2 + j;
      mesh.uv[v] = Vec2(i * g.h1, j * g.h2);
      X.row(v) << lift.phi[v], g.at(i, j).transpose();
    }
  DiscreteImmersion L =
      DiscreteImmersion::create(std::move(mesh), Target{TargetKind::Heisenberg, period}, std::move(X), 1e-12);
  set_legendrian_tol_from_restoration(L);
  return L;
}

CliffordMinimalityRow clifford_minimality(int n, double warp) {
  CliffordOptions o;
  o.n = n;
  o.warp = warp;
  const DiscreteImmersion L = clifford_lift(o);
  CliffordMinimalityRow row;
  row.n = n;
  row.area = total_area(L);
  const double exact = 4.0 * std::numbers::pi * std::numbers::pi;
  row.area_rel_error = std::abs(row.area - exact) / exact;
  for (auto z : hopf_differential(L)) row.hopf_max = std::max(row.hopf_max, std::abs(z));
  const MeanCurvatureForm m = mean_curvature_one_form(L, second_fundamental_form(L));
  row.laplacian_beta_max = m.max_laplacian;
  row.curl_max = m.max_curl;
  VecX c(5);
  c << 0.0, std::cos(0.4), std::sin(0.4), std::cos(0.7), std::sin(0.7);
  HamiltonianSpec hs;
  hs.h = bump_field(c, 1.0, {1, 2, 3, 4});
  VecX f(L.num_vertices());
  for (int v = 0; v < L.num_vertices(); ++v) f(v) = std::cos(L.mesh.uv[v](0));
  row.weak_stationarity = weak_stationarity_residual(L, std::vector<int>(L.num_vertices(), 1), hs, f, 0.0);
  return row;
}

}  // namespace leg
