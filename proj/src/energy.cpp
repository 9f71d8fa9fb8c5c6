#include "leg/energy.hpp"

#include <cmath>
#include <string>

#include "leg/errors.hpp"
#include "leg/heisenberg.hpp"

namespace leg {

namespace {

struct FaceGeo {
  VecD e1, e2;
  double G11 = 0, G12 = 0, G22 = 0, det = 0, N = 0, A = 0;
};

struct EdgeGeo {
  int e = -1, f = -1, g = -1;
  VecD chord;
  double l2 = 0, P = 0, pi = 0, c = 0, s = 0;
};

struct Forward {
  std::vector<FaceGeo> faces;
  std::vector<EdgeGeo> edges;
  std::vector<double> q;
  double area = 0, penalty = 0;
};

double wedge_dot(const VecD& a, const VecD& b, const VecD& c, const VecD& d) {
  return a.dot(c) * b.dot(d) - a.dot(d) * b.dot(c);
}

Forward forward(const DiscreteImmersion& L) {
  Forward F;
  const int nf = L.num_faces();
  F.faces.resize(nf);
  for (int f = 0; f < nf; ++f) {
    FaceGeo& g = F.faces[f];
    face_chords(L, f, g.e1, g.e2);
    g.G11 = g.e1.squaredNorm();
    g.G12 = g.e1.dot(g.e2);
    g.G22 = g.e2.squaredNorm();
    g.det = g.G11 * g.G22 - g.G12 * g.G12;
    if (!(g.det > 1e-28 * std::pow(g.G11 + g.G22, 2))) throw DegeneracyError("degenerate face " + std::to_string(f), f);
    g.N = std::sqrt(g.det);
    g.A = 0.5 * g.N;
    F.area += g.A;
  }
  std::vector<double> S(nf, 0.0);
  for (int e = 0; e < L.topo.num_edges(); ++e) {
    if (!L.topo.interior_edge(e)) continue;
    EdgeGeo E;
    E.e = e;
    E.f = L.topo.edge_faces[e][0];
    E.g = L.topo.edge_faces[e][1];
    const FaceGeo& a = F.faces[E.f];
    const FaceGeo& b = F.faces[E.g];
    E.chord = edge_chord(L, L.topo.edges[e][0], L.topo.edges[e][1]);
    E.l2 = E.chord.squaredNorm();
    E.P = wedge_dot(a.e1, a.e2, b.e1, b.e2);
    E.pi = E.P / (a.N * b.N);
    E.c = 3.0 * E.l2 / (2.0 * (a.A + b.A));
    E.s = E.c * (2.0 - 2.0 * E.pi);
    S[E.f] += E.s;
    S[E.g] += E.s;
    F.edges.push_back(std::move(E));
  }
  F.q.resize(nf);
  for (int f = 0; f < nf; ++f) {
    F.q[f] = S[f] / (2.0 * F.faces[f].A);
    F.penalty += std::pow(1.0 + F.q[f], 2) * F.faces[f].A;
  }
  return F;
}

inline Vec4 yrow(const DiscreteImmersion& L, int v) { return L.positions.row(v).tail<4>().transpose(); }

inline VecD raw_diff(const DiscreteImmersion& L, int a, int b) {
  VecD d = (L.positions.row(b) - L.positions.row(a)).transpose();
  if (L.target.kind == TargetKind::Heisenberg) d(0) = reduce_period(d(0), L.target.phi_period);
  return d;
}

// Reverse mode through face_chords.
void face_chords_adjoint(const DiscreteImmersion& L, int f, const VecD& eb1, const VecD& eb2, MatX& Xb) {
  const auto& t = L.mesh.triangles[f];
  VecD db1 = eb1, db2 = eb2;
  if (L.target.kind == TargetKind::Heisenberg) {
    const VecD d1 = raw_diff(L, t[0], t[1]), d2 = raw_diff(L, t[0], t[2]);
    const Vec4 yc = yrow(L, t[0]) + (d1.tail<4>() + d2.tail<4>()) / 3.0;
    const Vec4 Jyc = jmul(yc);
    Vec4 ycb = -eb1(0) * jmul(d1.tail<4>()) - eb2(0) * jmul(d2.tail<4>());
    db1(0) = -eb1(0);
    db2(0) = -eb2(0);
    db1.tail<4>() += eb1(0) * Jyc + ycb / 3.0;
    db2.tail<4>() += eb2(0) * Jyc + ycb / 3.0;
    Xb.row(t[0]).tail<4>() += ycb.transpose();
  }
  Xb.row(t[1]) += db1.transpose();
  Xb.row(t[2]) += db2.transpose();
  Xb.row(t[0]) -= (db1 + db2).transpose();
}

void edge_chord_adjoint(const DiscreteImmersion& L, int a, int b, const VecD& eb, MatX& Xb) {
  VecD db = eb;
  if (L.target.kind == TargetKind::Heisenberg) {
    const VecD d = raw_diff(L, a, b);
    const Vec4 ya = yrow(L, a);
    db(0) = -eb(0);
    db.tail<4>() += eb(0) * jmul(ya);
    Xb.row(a).tail<4>() += (-eb(0) * jmul(d.tail<4>())).transpose();
  }
  Xb.row(b) += db.transpose();
  Xb.row(a) -= db.transpose();
}

// Forward mode through face_chords.
void face_chords_tangent(const DiscreteImmersion& L, int f, const MatX& W, VecD& de1, VecD& de2) {
  const auto& t = L.mesh.triangles[f];
  const VecD dd1 = (W.row(t[1]) - W.row(t[0])).transpose();
  const VecD dd2 = (W.row(t[2]) - W.row(t[0])).transpose();
  de1 = dd1;
  de2 = dd2;
  if (L.target.kind == TargetKind::Heisenberg) {
    const VecD d1 = raw_diff(L, t[0], t[1]), d2 = raw_diff(L, t[0], t[2]);
    const Vec4 yc = yrow(L, t[0]) + (d1.tail<4>() + d2.tail<4>()) / 3.0;
    const Vec4 dyc = W.row(t[0]).tail<4>().transpose() + (dd1.tail<4>() + dd2.tail<4>()) / 3.0;
    de1(0) = -dd1(0) + jmul(yc).dot(dd1.tail<4>()) + jmul(dyc).dot(d1.tail<4>());
    de2(0) = -dd2(0) + jmul(yc).dot(dd2.tail<4>()) + jmul(dyc).dot(d2.tail<4>());
  }
}

VecD edge_chord_tangent(const DiscreteImmersion& L, int a, int b, const MatX& W) {
  const VecD dd = (W.row(b) - W.row(a)).transpose();
  VecD de = dd;
  if (L.target.kind == TargetKind::Heisenberg) {
    const VecD d = raw_diff(L, a, b);
    const Vec4 ya = yrow(L, a);
    const Vec4 dya = W.row(a).tail<4>().transpose();
    de(0) = -dd(0) + jmul(ya).dot(dd.tail<4>()) + jmul(dya).dot(d.tail<4>());
  }
  return de;
}

}  // namespace

MatX project_tangent(const DiscreteImmersion& L, const MatX& w) {
  if (L.target.kind == TargetKind::Heisenberg) return w;
  MatX out(w.rows(), w.cols());
  for (int v = 0; v < w.rows(); ++v)
    out.row(v) = L.target.tangent_project(L.point(v), w.row(v).transpose()).transpose();
  return out;
}

std::vector<double> gauss_map_density(const DiscreteImmersion& L) { return forward(L).q; }

EnergyBreakdown energy(const DiscreteImmersion& L, double eps) {
  if (!(eps > 0.0)) throw DomainError("epsilon must be positive");
  const Forward F = forward(L);
  EnergyBreakdown B;
  B.epsilon = eps;
  B.area = F.area;
  B.penalty = std::pow(eps, 4) * F.penalty;
  B.total = B.area + B.penalty;
  B.entropy_indicator = B.penalty * std::log(1.0 / eps);
  return B;
}

double first_variation(const DiscreteImmersion& L, double eps, const MatX& w_raw) {
  const MatX W = project_tangent(L, w_raw);
  const double e4 = std::pow(eps, 4);
  const Forward F = forward(L);
  const int nf = L.num_faces();
  std::vector<double> dN(nf), dA(nf);
  std::vector<VecD> de1(nf), de2(nf);
  double dE = 0.0;
  for (int f = 0; f < nf; ++f) {
    const FaceGeo& g = F.faces[f];
    face_chords_tangent(L, f, W, de1[f], de2[f]);
    // dA = 1/2 N g^{ij} e_i . de_j
    const double dG11 = 2.0 * g.e1.dot(de1[f]);
    const double dG22 = 2.0 * g.e2.dot(de2[f]);
    const double dG12 = g.e1.dot(de2[f]) + de1[f].dot(g.e2);
    const double ddet = dG11 * g.G22 + g.G11 * dG22 - 2.0 * g.G12 * dG12;
    dN[f] = ddet / (2.0 * g.N);
    dA[f] = 0.5 * dN[f];
    dE += dA[f];
  }
  std::vector<double> dS(nf, 0.0);
  for (const EdgeGeo& E : F.edges) {
    const FaceGeo& a = F.faces[E.f];
    const FaceGeo& b = F.faces[E.g];
    const double dP = de1[E.f].dot(b.e1) * a.e2.dot(b.e2) + a.e1.dot(de1[E.g]) * a.e2.dot(b.e2) +
                      a.e1.dot(b.e1) * (de2[E.f].dot(b.e2) + a.e2.dot(de2[E.g])) -
                      (de1[E.f].dot(b.e2) + a.e1.dot(de2[E.g])) * a.e2.dot(b.e1) -
                      a.e1.dot(b.e2) * (de2[E.f].dot(b.e1) + a.e2.dot(de1[E.g]));
    const double dpi = dP / (a.N * b.N) - E.pi * (dN[E.f] / a.N + dN[E.g] / b.N);
    const auto [va, vb] = L.topo.edges[E.e];
    const double dl2 = 2.0 * E.chord.dot(edge_chord_tangent(L, va, vb, W));
    const double dc = E.c * (dl2 / E.l2 - (dA[E.f] + dA[E.g]) / (a.A + b.A));
    const double ds = dc * (2.0 - 2.0 * E.pi) - 2.0 * E.c * dpi;
    dS[E.f] += ds;
    dS[E.g] += ds;
  }
  for (int f = 0; f < nf; ++f) {
    const double A = F.faces[f].A, q = F.q[f];
    const double dq = dS[f] / (2.0 * A) - q * dA[f] / A;
    dE += e4 * (2.0 * (1.0 + q) * dq * A + (1.0 + q) * (1.0 + q) * dA[f]);
  }
  return dE;
}

std::vector<double> face_area_variation(const DiscreteImmersion& L, const MatX& w_raw) {
  const MatX W = project_tangent(L, w_raw);
  const Forward F = forward(L);
  std::vector<double> dA(L.num_faces());
  for (int f = 0; f < L.num_faces(); ++f) {
    const FaceGeo& g = F.faces[f];
    VecD de1, de2;
    face_chords_tangent(L, f, W, de1, de2);
    const double dG11 = 2.0 * g.e1.dot(de1);
    const double dG22 = 2.0 * g.e2.dot(de2);
    const double dG12 = g.e1.dot(de2) + de1.dot(g.e2);
    dA[f] = (dG11 * g.G22 + g.G11 * dG22 - 2.0 * g.G12 * dG12) / (4.0 * g.N);
  }
  return dA;
}

FirstVariation gradient(const DiscreteImmersion& L, double eps) {
  const double e4 = std::pow(eps, 4);
  const Forward F = forward(L);
  const int nf = L.num_faces();
  MatX Xb = MatX::Zero(L.num_vertices(), L.target.dim());
  std::vector<double> Ab(nf), Nb(nf, 0.0), Sb(nf);
  std::vector<VecD> eb1(nf), eb2(nf);
  for (int f = 0; f < nf; ++f) {
    const double q = F.q[f];
    Ab[f] = 1.0 + e4 * ((1.0 + q) * (1.0 + q) - 2.0 * (1.0 + q) * q);
    Sb[f] = e4 * (1.0 + q);
    eb1[f] = VecD::Zero(L.target.dim());
    eb2[f] = VecD::Zero(L.target.dim());
  }
  for (const EdgeGeo& E : F.edges) {
    const FaceGeo& a = F.faces[E.f];
    const FaceGeo& b = F.faces[E.g];
    const double sb = Sb[E.f] + Sb[E.g];
    const double cb = sb * (2.0 - 2.0 * E.pi);
    const double pib = -2.0 * E.c * sb;
    const double l2b = cb * 3.0 / (2.0 * (a.A + b.A));
    Ab[E.f] -= cb * E.c / (a.A + b.A);
    Ab[E.g] -= cb * E.c / (a.A + b.A);
    const double Pb = pib / (a.N * b.N);
    Nb[E.f] -= pib * E.pi / a.N;
    Nb[E.g] -= pib * E.pi / b.N;
    const double ac = a.e1.dot(b.e1), bd = a.e2.dot(b.e2), ad = a.e1.dot(b.e2), bc = a.e2.dot(b.e1);
    eb1[E.f] += Pb * (bd * b.e1 - bc * b.e2);
    eb2[E.f] += Pb * (ac * b.e2 - ad * b.e1);
    eb1[E.g] += Pb * (bd * a.e1 - ad * a.e2);
    eb2[E.g] += Pb * (ac * a.e2 - bc * a.e1);
    const auto [va, vb] = L.topo.edges[E.e];
    edge_chord_adjoint(L, va, vb, 2.0 * l2b * E.chord, Xb);
  }
  for (int f = 0; f < nf; ++f) {
    const FaceGeo& g = F.faces[f];
    Nb[f] += 0.5 * Ab[f];
    const double detb = Nb[f] / (2.0 * g.N);
    eb1[f] += detb * (2.0 * g.G22 * g.e1 - 2.0 * g.G12 * g.e2);
    eb2[f] += detb * (2.0 * g.G11 * g.e2 - 2.0 * g.G12 * g.e1);
    face_chords_adjoint(L, f, eb1[f], eb2[f], Xb);
  }
  return {project_tangent(L, Xb)};
}

}  // namespace leg
