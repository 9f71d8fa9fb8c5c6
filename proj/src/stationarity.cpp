#include "leg/stationarity.hpp"

#include "leg/energy.hpp"
#include "leg/errors.hpp"

namespace leg {

double weak_stationarity_residual(const DiscreteImmersion& L, const std::vector<int>& N, const HamiltonianSpec& hs,
                                  const VecX& f, double lambda) {
  const int V = L.num_vertices();
  if (static_cast<int>(N.size()) != V || f.size() != V)
    throw ValidationError("multiplicity and level function need one value per vertex");
  for (int n : N)
    if (n < 1) throw ValidationError("multiplicity must be a positive integer");
  const MatX w = hamiltonian_deformation(L, hs);
  const std::vector<double> dA = face_area_variation(L, w);
  double sum = 0.0;
  for (int k = 0; k < L.num_faces(); ++k) {
    const auto& t = L.mesh.triangles[k];
    int above = 0;
    for (int v : t) above += f(v) > lambda;
    if (above == 1 || above == 2) {
      std::vector<VecX> cross;
      for (int i = 0; i < 3; ++i) {
        const int a = t[i], b = t[(i + 1) % 3];
        if ((f(a) > lambda) == (f(b) > lambda)) continue;
        const double s = (lambda - f(a)) / (f(b) - f(a));
        const VecX pa = L.point(a);
        cross.push_back(L.target.retract(pa + s * L.target.diff(pa, L.point(b))));
      }
      cross.push_back(L.target.midpoint(cross[0], cross[1]));
      for (const VecX& q : cross)
        if (hs.supported_at(q))
          throw LocalisationError("level set meets the support of h in face " + std::to_string(k), k);
    }
    if (above < 2) continue;
    const double Nf = (N[t[0]] + N[t[1]] + N[t[2]]) / 3.0;
    sum += Nf * dA[k];
  }
  return sum;
}

double area_variation_pairing(const DiscreteImmersion& L, const HamiltonianSpec& hs) {
  const MeanCurvatureForm mcf = mean_curvature_one_form(L, second_fundamental_form(L));
  std::vector<double> h(L.num_vertices());
  for (int v = 0; v < L.num_vertices(); ++v) h[v] = hs.h.value(L.point(v));
  auto dbeta = [&](int a, int b) {
    const int e = L.topo.edge_index(a, b);
    return (L.topo.edges[e][0] == a ? 0.5 : -0.5) * mcf.gamma[e];
  };
  double sum = 0.0;
  for (int k = 0; k < L.num_faces(); ++k) {
    const auto& t = L.mesh.triangles[k];
    VecD e1, e2;
    face_chords(L, k, e1, e2);
    Mat2 g;
    g << e1.dot(e1), e1.dot(e2), e1.dot(e2), e2.dot(e2);
    const double area = 0.5 * std::sqrt(std::max(0.0, g.determinant()));
    const Vec2 dh(h[t[1]] - h[t[0]], h[t[2]] - h[t[0]]);
    const Vec2 db(dbeta(t[0], t[1]), dbeta(t[0], t[2]));
    sum += dh.dot(g.inverse() * db) * area;
  }
  return -2.0 * L.target.horizontal_coefficient(hs.convention) * sum;
}

}  // namespace leg
