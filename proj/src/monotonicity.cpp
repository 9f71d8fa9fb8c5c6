#include "leg/monotonicity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "leg/errors.hpp"
#include "leg/heisenberg.hpp"

namespace leg {

namespace {

constexpr double kPi = 3.14159265358979323846;

StiefelPoint as_stiefel(const VecX& q) { return {q.head<4>(), q.segment<4>(4)}; }
HeisenbergPoint as_heisenberg(const VecX& q) { return {q(0), q.tail<4>()}; }

double gauge_r(double rho2, double phi) { return std::pow(rho2 * rho2 + 4.0 * phi * phi, 0.25); }

// (1 + s arctan s) / sqrt(1 + s^2) written in (rho^2, phi) so that rho = 0 is regular.
double weight_rp(double rho2, double phi) {
  const double r2 = std::sqrt(rho2 * rho2 + 4.0 * phi * phi);
  return (rho2 + 2.0 * phi * std::atan2(2.0 * phi, rho2)) / r2;
}

struct Dsu {
  std::vector<int> p;
  explicit Dsu(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

// Fraction of a triangle where the linear interpolant of (a, b, c) is below s.
double sublevel_fraction(double a, double b, double c, double s) {
  double v[3] = {a, b, c};
  std::sort(v, v + 3);
  if (s <= v[0]) return 0.0;
  if (s >= v[2]) return 1.0;
  if (s <= v[1]) return (s - v[0]) * (s - v[0]) / ((v[1] - v[0]) * (v[2] - v[0]));
  return 1.0 - (v[2] - s) * (v[2] - s) / ((v[2] - v[0]) * (v[2] - v[1]));
}

}  // namespace

GaugeFrame target_gauge(const Target& t, const VecX& p0, const VecX& q) {
  if (t.kind == TargetKind::Stiefel) return gauge(as_stiefel(p0), as_stiefel(q));
  return gauge_h(as_heisenberg(p0), as_heisenberg(q), t.phi_period);
}

void gauge_differentials(const Target& t, const VecX& p0, const VecX& q, VecX& drho2, VecX& dphi) {
  if (t.kind == TargetKind::Stiefel) {
    drho2 = 2.0 * (q - p0);
    dphi.resize(8);
    dphi << p0.segment<4>(4), -p0.head<4>();
    return;
  }
  drho2 = VecX::Zero(5);
  drho2.tail<4>() = 2.0 * (q.tail<4>() - p0.tail<4>());
  dphi.resize(5);
  dphi(0) = 1.0;
  dphi.tail<4>() = -jmul(p0.tail<4>());
}

VecX horizontal_gauge_gradient(const Target& t, const VecX& p0, const VecX& q) {
  const GaugeFrame G = target_gauge(t, p0, q);
  if (!(G.r_gauge > 0.0)) return VecX::Zero(t.dim());
  VecX drho2, dphi;
  gauge_differentials(t, p0, q, drho2, dphi);
  const double rho2 = G.rho * G.rho;
  const VecX dr = (rho2 * drho2 + 4.0 * G.phi * dphi) / (2.0 * std::pow(G.r_gauge, 3));
  return t.horizontal_frame(q, t.frame_gradient(q, dr));
}

double cutoff(double t) {
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  const double x = t - 1.0;
  return 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

double cutoff_d1(double t) {
  if (t <= 1.0 || t >= 2.0) return 0.0;
  const double x = t - 1.0;
  return -30.0 * x * x * (1.0 - x) * (1.0 - x);
}

double cutoff_d2(double t) {
  if (t <= 1.0 || t >= 2.0) return 0.0;
  const double x = t - 1.0;
  return -60.0 * x * (1.0 - x) * (1.0 - 2.0 * x);
}

double density_weight(double sigma) {
  if (std::isinf(sigma)) return kPi / 2.0;
  return (1.0 + sigma * std::atan(sigma)) / std::sqrt(1.0 + sigma * sigma);
}

VecD FaceGauge::vector(const Vec2& a) const {
  const Vec2 c = g_inv * a;
  return c(0) * e1 + c(1) * e2;
}

GaugeFields gauge_fields(const DiscreteImmersion& L, const VecX& p0) {
  GaugeFields G;
  G.p0 = p0;
  const int V = L.num_vertices();
  G.vertex.resize(V);
  std::vector<double> rho2(V), phi(V);
  for (int v = 0; v < V; ++v) {
    const GaugeFrame g = target_gauge(L.target, p0, L.point(v));
    VertexGauge& out = G.vertex[v];
    out.rho = g.rho;
    out.phi = g.phi;
    out.r = g.r_gauge;
    out.singular = !(g.r_gauge > 0.0);
    out.sigma = g.sigma_set ? g.sigma : (g.phi > 0 ? INFINITY : (g.phi < 0 ? -INFINITY : 0.0));
    out.arctan_sigma = g.arctan_sigma();
    rho2[v] = g.rho * g.rho;
    phi[v] = g.phi;
  }
  const double P = L.target.kind == TargetKind::Heisenberg ? L.target.phi_period : 0.0;
  G.face.resize(L.num_faces());
  for (int f = 0; f < L.num_faces(); ++f) {
    const auto& t = L.mesh.triangles[f];
    FaceGauge& F = G.face[f];
    face_chords(L, f, F.e1, F.e2);
    Mat2 g;
    g << F.e1.dot(F.e1), F.e1.dot(F.e2), F.e1.dot(F.e2), F.e2.dot(F.e2);
    F.area = 0.5 * std::sqrt(std::max(0.0, g.determinant()));
    F.g_inv = g.inverse();
    const VecX q0 = L.point(t[0]);
    const VecX d1 = L.target.diff(q0, L.point(t[1])), d2 = L.target.diff(q0, L.point(t[2]));
    F.centroid = L.target.retract(q0 + (d1 + d2) / 3.0);
    F.valid = !(G.vertex[t[0]].singular || G.vertex[t[1]].singular || G.vertex[t[2]].singular);
    const double dp1 = reduce_period(phi[t[1]] - phi[t[0]], P);
    const double dp2 = reduce_period(phi[t[2]] - phi[t[0]], P);
    F.rho2 = (rho2[t[0]] + rho2[t[1]] + rho2[t[2]]) / 3.0;
    F.phi = phi[t[0]] + (dp1 + dp2) / 3.0;
    F.r = gauge_r(F.rho2, F.phi);
    F.arctan_sigma = std::atan2(2.0 * F.phi, F.rho2);
    F.sigma = F.rho2 > 0.0 ? 2.0 * F.phi / F.rho2 : (F.phi > 0 ? INFINITY : -INFINITY);
    F.d_rho2 = Vec2(rho2[t[1]] - rho2[t[0]], rho2[t[2]] - rho2[t[0]]);
    F.d_phi = Vec2(dp1, dp2);
    if (F.r > 0.0) {
      const double r3 = F.r * F.r * F.r, r4 = r3 * F.r;
      F.d_r = (F.rho2 * F.d_rho2 + 4.0 * F.phi * F.d_phi) / (2.0 * r3);
      F.d_arctan = (2.0 * F.rho2 * F.d_phi - 2.0 * F.phi * F.d_rho2) / r4;
    } else {
      F.valid = false;
    }
  }
  return G;
}

HamiltonianSpec hamiltonian_arctan(const Target& t, const VecX& p0, double r, double eta, ReebConvention conv) {
  if (!(eta > 0.0) || !(r < 1.0)) throw DomainError("need 0 < eta < r < 1");
  if (!(eta < r)) throw DomainError("need eta < r");
  HamiltonianSpec hs;
  hs.convention = conv;
  hs.h.value = [t, p0, r, eta](const VecX& q) {
    const GaugeFrame G = target_gauge(t, p0, q);
    if (!(G.r_gauge > 0.0)) return 0.0;
    return (cutoff(G.r_gauge / r) - cutoff(G.r_gauge / eta)) * G.arctan_sigma();
  };
  hs.h.gradient = [t, p0, r, eta](const VecX& q) {
    const GaugeFrame G = target_gauge(t, p0, q);
    VecX out = VecX::Zero(q.size());
    const double rg = G.r_gauge;
    if (!(rg > 0.0)) return out;
    VecX drho2, dphi;
    gauge_differentials(t, p0, q, drho2, dphi);
    const double rho2 = G.rho * G.rho;
    const VecX dr = (rho2 * drho2 + 4.0 * G.phi * dphi) / (2.0 * rg * rg * rg);
    const VecX datan = (2.0 * rho2 * dphi - 2.0 * G.phi * drho2) / std::pow(rg, 4);
    const double c = cutoff(rg / r) - cutoff(rg / eta);
    const double dc = cutoff_d1(rg / r) / r - cutoff_d1(rg / eta) / eta;
    return VecX(c * datan + G.arctan_sigma() * dc * dr);
  };
  hs.in_support = [t, p0, r, eta](const VecX& q) {
    const double rg = target_gauge(t, p0, q).r_gauge;
    return rg >= eta && rg <= 2.0 * r;
  };
  return hs;
}

MonotonicityReport monotonicity_balance(const DiscreteImmersion& L, const VecX& p0, double r, double eta,
                                        int min_faces) {
  const HamiltonianSpec hs = hamiltonian_arctan(L.target, p0, r, eta);
  const GaugeFields G = gauge_fields(L, p0);
  MonotonicityReport rep;
  rep.r = r;
  rep.eta = eta;
  for (const FaceGauge& F : G.face)
    if (F.valid && F.r > eta && F.r < 2.0 * r) ++rep.annulus_faces;
  if (rep.annulus_faces < min_faces)
    throw ResolutionError("annulus eta < r < 2r has " + std::to_string(rep.annulus_faces) + " faces, need " +
                          std::to_string(min_faces));

  const SecondFundamentalForm II = second_fundamental_form(L);
  const MeanCurvatureForm mcf = mean_curvature_one_form(L, II);
  std::vector<double> h(L.num_vertices());
  for (int v = 0; v < L.num_vertices(); ++v) h[v] = hs.h.value(L.point(v));

  auto dbeta_along = [&](int a, int b) {
    const int e = L.topo.edge_index(a, b);
    const double s = L.topo.edges[e][0] == a ? 0.5 : -0.5;
    return s * mcf.gamma[e];
  };

  const char* names[14] = {"pairing_dh_dbeta",        "outer_radial",       "outer_O1_chi",
                           "outer_Or_chi_prime",      "outer_chi_second",   "outer_chi_prime_cross",
                           "outer_sigma_gradient",    "perpendicular_gradient", "inner_radial",
                           "inner_sigma_gradient",    "inner_chi_prime_cross",  "inner_chi_second",
                           "inner_O1_chi",            "inner_Or_chi_prime"};
  const char* sides[14] = {"lhs", "lhs", "bookkeeping", "bookkeeping", "lhs", "lhs", "lhs",
                           "rhs", "rhs", "rhs",         "rhs",         "rhs", "bookkeeping", "bookkeeping"};
  double s[14] = {0};
  for (int f = 0; f < L.num_faces(); ++f) {
    const FaceGauge& F = G.face[f];
    if (!F.valid) continue;
    const auto& t = L.mesh.triangles[f];
    const double A = F.area;
    const double xr = F.r / r, xe = F.r / eta;
    const double cr = cutoff(xr), ce = cutoff(xe);
    const double cpr = cutoff_d1(xr), cpe = cutoff_d1(xe);
    const double cppr = cutoff_d2(xr), cppe = cutoff_d2(xe);
    const Vec2 dbeta(dbeta_along(t[0], t[1]), dbeta_along(t[0], t[2]));
    const Vec2 dh(h[t[1]] - h[t[0]], h[t[2]] - h[t[0]]);
    const Vec2 dh_chain = (cr - ce) * F.d_arctan + F.arctan_sigma * (cpr / r - cpe / eta) * F.d_r;
    const double grad_r2 = F.norm2(F.d_r);
    const double r2 = F.r * F.r;
    // sigma arctan(sigma) / sqrt(1 + sigma^2) = 2 phi arctan(sigma) / r^2
    const double bracket = grad_r2 + 2.0 * F.phi * F.arctan_sigma / r2;
    const double cross = F.arctan_sigma * F.dot(F.d_r, F.d_arctan) / F.r;
    const double sig2 = F.norm2(F.d_arctan);
    const double perp2 = horizontal_gauge_gradient(L.target, p0, F.centroid).squaredNorm() - grad_r2;

    s[0] += F.dot(dh, dbeta) * A;
    s[1] += -xr * cpr / r2 * bracket * A;
    s[2] += cr * A;
    s[3] += xr * std::abs(cpr) * A;
    s[4] += 0.25 * xr * xr * cppr * cross * A;
    s[5] += -0.75 * xr * cpr * cross * A;
    s[6] += 0.25 * xr * cpr * sig2 * A;
    s[7] += 4.0 * (cr - ce) * perp2 / r2 * A;
    s[8] += -xe * cpe / r2 * bracket * A;
    s[9] += 0.25 * xe * cpe * sig2 * A;
    s[10] += -0.75 * xe * cpe * cross * A;
    s[11] += 0.25 * xe * xe * cppe * cross * A;
    s[12] += ce * A;
    s[13] += xe * std::abs(cpe) * A;
    rep.pairing_assembled += F.dot(dh_chain, dbeta) * A;
  }
  for (int k = 0; k < 14; ++k) {
    rep.terms.push_back({names[k], sides[k], s[k]});
    if (std::string(sides[k]) == "lhs") rep.lhs += s[k];
    else if (std::string(sides[k]) == "rhs") rep.rhs += s[k];
    else rep.bookkeeping += s[k];
  }
  const double scale = std::max(std::abs(rep.lhs), std::abs(rep.rhs));
  rep.residual = scale > 0.0 ? std::abs(rep.lhs - rep.rhs) / scale : 0.0;
  return rep;
}

std::vector<GaugeCheck> gauge_checks(const DiscreteImmersion& L, const GaugeFields& G, double r_lo, double r_hi) {
  GaugeCheck structure{"structure"}, horizontal{"horizontal_gradient"}, perp{"perpendicular_gradient"},
      cap{"arctan_gradient_cap"};
  auto add = [](GaugeCheck& c, double defect, double scale) {
    c.max_defect = std::max(c.max_defect, defect);
    c.constant = std::max(c.constant, defect / scale);
    ++c.count;
  };
  const Target& T = L.target;
  for (const FaceGauge& F : G.face) {
    if (!F.valid) continue;
    const VecX& q = F.centroid;
    const GaugeFrame g = target_gauge(T, G.p0, q);
    if (!(g.rho > 0.0) || g.r_gauge < r_lo || g.r_gauge > r_hi) continue;
    // Orthonormal basis of the chord plane.
    const VecX u1 = VecX(F.e1).normalized();
    VecX u2 = VecX(F.e2) - u1.dot(VecX(F.e2)) * u1;
    u2.normalize();
    auto proj = [&](const VecX& v) -> VecX { return u1.dot(v) * u1 + u2.dot(v) * u2; };
    VecX drho2, dphi;
    gauge_differentials(T, G.p0, q, drho2, dphi);
    const VecX h_rho2 = T.horizontal_frame(q, T.frame_gradient(q, drho2));
    const VecX h_phi = T.horizontal_frame(q, T.frame_gradient(q, dphi));
    const double rho2 = g.rho * g.rho, r = g.r_gauge;
    const double r3 = r * r * r, r4 = r3 * r;
    const VecX h_r = (rho2 * h_rho2 + 4.0 * g.phi * h_phi) / (2.0 * r3);
    const VecX p_atan = proj((2.0 * rho2 * h_phi - 2.0 * g.phi * h_rho2) / r4);

    const double p_rho = proj(h_rho2).squaredNorm() / (4.0 * rho2);
    add(structure, std::abs(1.0 - p_rho - proj(h_phi).squaredNorm() / rho2), r * r);
    const VecX lhs = (h_r - proj(h_r)) / r;
    // With this J_H orientation the identity carries a minus sign.
    add(perp, (lhs + 0.5 * T.jh_frame(p_atan)).norm(), 1.0 + r);
    const double ga = p_atan.norm();
    cap.max_defect = std::max(cap.max_defect, ga - 2.0 / r);
    cap.constant = std::max(cap.constant, ga * r / 2.0);
    ++cap.count;
  }
  for (int v = 0; v < L.num_vertices(); ++v) {
    const VertexGauge& g = G.vertex[v];
    if (g.singular || g.r < r_lo || g.r > r_hi) continue;
    const double gh2 = horizontal_gauge_gradient(T, G.p0, L.point(v)).squaredNorm();
    add(horizontal, std::abs(gh2 - g.rho * g.rho / (g.r * g.r)), g.r * g.r);
  }
  return {structure, horizontal, perp, cap};
}

double mean_edge_length(const DiscreteImmersion& L) {
  double s = 0.0;
  for (const auto& e : L.topo.edges) s += edge_chord(L, e[0], e[1]).norm();
  return L.topo.num_edges() > 0 ? s / L.topo.num_edges() : 0.0;
}

DensityCurve density_curve(const DiscreteImmersion& L, const VecX& p0, const std::vector<double>& radii,
                           double min_edges) {
  DensityCurve c;
  c.p0 = p0;
  const double hmin = min_edges * mean_edge_length(L);
  std::vector<double> rv(L.num_vertices());
  for (int v = 0; v < L.num_vertices(); ++v) rv[v] = target_gauge(L.target, p0, L.point(v)).r_gauge;
  const std::vector<double> area = face_areas(L);
  std::vector<double> sorted = radii;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  for (double s : sorted) {
    if (!(s > 0.0)) throw DomainError("density radii must be positive");
    if (s < hmin) {
      c.warnings.push_back("radius " + std::to_string(s) + " below " + std::to_string(min_edges) +
                           " edge lengths; excluded");
      continue;
    }
    double a = 0.0;
    Dsu dsu(L.num_faces());
    std::vector<char> active(L.num_faces(), 0);
    for (int f = 0; f < L.num_faces(); ++f) {
      const auto& t = L.mesh.triangles[f];
      const double frac = sublevel_fraction(rv[t[0]], rv[t[1]], rv[t[2]], s);
      a += frac * area[f];
      active[f] = frac > 0.0;
    }
    for (int e = 0; e < L.topo.num_edges(); ++e) {
      const int f0 = L.topo.edge_faces[e][0], f1 = L.topo.edge_faces[e][1];
      if (f0 < 0 || f1 < 0 || !active[f0] || !active[f1]) continue;
      if (std::min(rv[L.topo.edges[e][0]], rv[L.topo.edges[e][1]]) < s) dsu.unite(f0, f1);
    }
    int comps = 0;
    for (int f = 0; f < L.num_faces(); ++f)
      if (active[f] && dsu.find(f) == f) ++comps;
    c.radii.push_back(s);
    c.ratios.push_back(a / (s * s));
    c.counts.push_back(comps);
  }
  return c;
}

double DensityKernel::operator()(double t) const {
  if (t <= lo || t >= hi) return 0.0;
  const double x = (2.0 * t - lo - hi) / (hi - lo);
  return std::exp(-1.0 / (1.0 - x * x)) / norm;
}

DensityKernel bump_kernel(double lo, double hi, const std::string& name) {
  if (!(lo > 0.0 && hi > lo)) throw DomainError("kernel support must lie in (0, inf)");
  DensityKernel k{name, lo, hi, 1.0};
  // Composite Simpson on the support.
  const int n = 20000;
  const double h = (hi - lo) / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * k(lo + i * h);
  }
  k.norm = s * h / 3.0;
  return k;
}

std::vector<DensityKernel> standard_kernels() {
  return {bump_kernel(0.5, 2.0, "bump[0.5,2]"), bump_kernel(1.0, 3.0, "bump[1,3]")};
}

Theta0Estimate theta0_estimate(const DiscreteImmersion& L, const VecX& p0, const DensityKernel& k, double eta,
                               double min_edges) {
  Theta0Estimate out;
  out.kernel = k.name;
  out.eta = eta > 0.0 ? eta : min_edges * mean_edge_length(L) / k.lo;
  const std::vector<double> area = face_areas(L);
  double s = 0.0;
  for (int f = 0; f < L.num_faces(); ++f) {
    const auto& t = L.mesh.triangles[f];
    double q = 0.0;
    for (int i = 0; i < 3; ++i) {
      const VecX m = L.target.midpoint(L.point(t[i]), L.point(t[(i + 1) % 3]));
      const GaugeFrame G = target_gauge(L.target, p0, m);
      if (!(G.r_gauge > 0.0)) continue;
      const double x = G.r_gauge / out.eta;
      const double kv = k(x);
      if (kv == 0.0) continue;
      q += kv / x * weight_rp(G.rho * G.rho, G.phi);
    }
    s += area[f] * q / 3.0;
  }
  out.theta0 = s / (out.eta * out.eta);
  const double m = out.theta0 / (2.0 * kPi);
  out.multiplicity = static_cast<int>(std::lround(m));
  out.distance_to_integer = std::abs(m - out.multiplicity);
  return out;
}

QuasiMonotonicity quasi_monotonicity(const DensityCurve& c) {
  QuasiMonotonicity q;
  q.upper = 0.0;
  q.lower = INFINITY;
  if (c.radii.empty()) return q;
  // radii are stored in decreasing order
  const double big = c.ratios.front();
  for (size_t i = 0; i < c.radii.size(); ++i) {
    q.spike = std::max(q.spike, c.ratios[i] / big);
    for (size_t j = 0; j < c.radii.size(); ++j) {
      if (!(2.0 * c.radii[j] < c.radii[i])) continue;
      const double ratio = c.ratios[j] / c.ratios[i];
      q.upper = std::max(q.upper, ratio);
      q.lower = std::min(q.lower, ratio);
    }
  }
  if (std::isinf(q.lower)) q.lower = 0.0;
  return q;
}

}  // namespace leg
