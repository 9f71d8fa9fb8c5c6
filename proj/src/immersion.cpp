#include "leg/immersion.hpp"

#include <cmath>
#include <queue>
#include <string>

#include "leg/errors.hpp"
#include "leg/heisenberg.hpp"

namespace leg {

DiscreteImmersion DiscreteImmersion::create(SurfaceMesh mesh, Target target, MatX positions, double legendrian_tol) {
  if (positions.rows() != mesh.num_vertices || positions.cols() != target.dim())
    throw ValidationError("positions must be " + std::to_string(mesh.num_vertices) + " x " +
                          std::to_string(target.dim()));
  if (!positions.allFinite()) throw ValidationError("non-finite vertex position");
  if (target.kind == TargetKind::Stiefel) {
    for (int v = 0; v < positions.rows(); ++v) {
      const Vec4 a = positions.row(v).head<4>(), b = positions.row(v).segment<4>(4);
      if (std::abs(a.squaredNorm() - 1.0) > 1e-11 || std::abs(b.squaredNorm() - 1.0) > 1e-11 ||
          std::abs(a.dot(b)) > 1e-11)
        throw ValidationError("vertex " + std::to_string(v) + " is not an orthonormal frame");
    }
  }
  DiscreteImmersion L;
  L.topo = MeshTopology::build(mesh);
  L.mesh = std::move(mesh);
  L.target = target;
  L.positions = std::move(positions);
  L.legendrian_tol = legendrian_tol;
  return L;
}

namespace {

// Frame components of a chord d with base y (Heisenberg) or identity (Stiefel).
inline void chord_to_frame(const Target& t, const Vec4& y, VecD& d) {
  if (t.kind == TargetKind::Heisenberg) d(0) = -d(0) + jmul(y).dot(d.tail<4>());
}

inline VecD row_diff(const DiscreteImmersion& L, int a, int b) {
  VecD d = (L.positions.row(b) - L.positions.row(a)).transpose();
  if (L.target.kind == TargetKind::Heisenberg) d(0) = reduce_period(d(0), L.target.phi_period);
  return d;
}

inline Vec4 y_of(const DiscreteImmersion& L, int v) {
  return L.positions.row(v).tail<4>().transpose();
}

VecX wedge_full(const VecX& x, const VecX& y) {
  const int D = static_cast<int>(x.size());
  VecX w(D * (D - 1) / 2);
  int k = 0;
  for (int i = 0; i < D; ++i)
    for (int j = i + 1; j < D; ++j) w(k++) = x(i) * y(j) - x(j) * y(i);
  return w;
}

MatX orthonormal_pair(const MatX& A) {
  MatX T(A.rows(), 2);
  T.col(0) = A.col(0).normalized();
  VecX c1 = A.col(1) - T.col(0).dot(A.col(1)) * T.col(0);
  T.col(1) = c1.normalized();
  return T;
}

}  // namespace

void face_chords(const DiscreteImmersion& L, int f, VecD& e1, VecD& e2) {
  const auto& t = L.mesh.triangles[f];
  e1 = row_diff(L, t[0], t[1]);
  e2 = row_diff(L, t[0], t[2]);
  if (L.target.kind == TargetKind::Heisenberg) {
    const Vec4 yc = y_of(L, t[0]) + (e1.tail<4>() + e2.tail<4>()) / 3.0;
    chord_to_frame(L.target, yc, e1);
    chord_to_frame(L.target, yc, e2);
  }
}

VecD edge_chord(const DiscreteImmersion& L, int a, int b) {
  VecD d = row_diff(L, a, b);
  if (L.target.kind == TargetKind::Heisenberg) chord_to_frame(L.target, y_of(L, a) + 0.5 * d.tail<4>(), d);
  return d;
}

std::vector<double> face_areas(const DiscreteImmersion& L) {
  std::vector<double> A(L.num_faces());
  VecD e1, e2;
  for (int f = 0; f < L.num_faces(); ++f) {
    face_chords(L, f, e1, e2);
    const double det = e1.squaredNorm() * e2.squaredNorm() - std::pow(e1.dot(e2), 2);
    A[f] = 0.5 * std::sqrt(std::max(det, 0.0));
  }
  return A;
}

double total_area(const DiscreteImmersion& L) {
  double s = 0.0;
  for (double a : face_areas(L)) s += a;
  return s;
}

std::vector<FaceFrame> face_frames(const DiscreteImmersion& L) {
  std::vector<FaceFrame> out(L.num_faces());
  VecD e1, e2;
  for (int f = 0; f < L.num_faces(); ++f) {
    face_chords(L, f, e1, e2);
    FaceFrame& F = out[f];
    const double det = e1.squaredNorm() * e2.squaredNorm() - std::pow(e1.dot(e2), 2);
    if (!(det > 1e-28 * std::pow(e1.squaredNorm() + e2.squaredNorm(), 2)))
      throw DegeneracyError("degenerate face " + std::to_string(f), f);
    F.area = 0.5 * std::sqrt(det);
    if (L.mesh.has_uv()) {
      const auto c = L.mesh.face_uv(f);
      Mat2 U;
      U << c[1] - c[0], c[2] - c[0];
      if (std::abs(U.determinant()) < 1e-300) throw DegeneracyError("degenerate uv face " + std::to_string(f), f);
      const Mat2 Ui = U.inverse();
      F.d1 = Ui(0, 0) * e1 + Ui(1, 0) * e2;
      F.d2 = Ui(0, 1) * e1 + Ui(1, 1) * e2;
    } else {
      F.d1 = e1;
      F.d2 = e2;
    }
    F.g << F.d1.dot(F.d1), F.d1.dot(F.d2), F.d1.dot(F.d2), F.d2.dot(F.d2);
    F.conformal_factor = std::sqrt(std::max(F.g.determinant(), 0.0));
    F.T = wedge_full(e1, e2) / (2.0 * F.area);
    MatX E(e1.size(), 2);
    E << e1, e2;
    const auto& t = L.mesh.triangles[f];
    VecX qc = L.point(t[0]) + (row_diff(L, t[0], t[1]) + row_diff(L, t[0], t[2])) / 3.0;
    qc = L.target.retract(qc);
    F.normal_basis = legendrian_normal_basis(L.target, qc, orthonormal_pair(E));
  }
  return out;
}

double edge_residual(const Target& t, const VecX& p, const VecX& q) {
  const VecX d = t.diff(p, q);
  if (t.kind == TargetKind::Heisenberg) return -d(0) + jmul(Vec4(p.tail<4>())).dot(Vec4(q.tail<4>()));
  const VecX m = t.retract(p + 0.5 * d);
  return t.alpha(m, d);
}

LegendrianResidual legendrian_residual(const DiscreteImmersion& L) {
  LegendrianResidual r;
  const int E = L.topo.num_edges();
  r.edge.resize(E);
  double s2 = 0.0;
  for (int e = 0; e < E; ++e) {
    const auto [a, b] = L.topo.edges[e];
    r.edge[e] = edge_residual(L.target, L.point(a), L.point(b));
    r.max_abs = std::max(r.max_abs, std::abs(r.edge[e]));
    s2 += r.edge[e] * r.edge[e];
  }
  r.rms = E > 0 ? std::sqrt(s2 / E) : 0.0;
  return r;
}

MatX legendrian_normal_basis(const Target& t, const VecX& q, const MatX& tangent) {
  const VecX R = t.reeb_frame(q);
  MatX N(R.size(), 3);
  N.col(0) = R / R.norm();
  for (int k = 0; k < 2; ++k) {
    VecX n = t.jh_frame(t.horizontal_frame(q, tangent.col(k)));
    for (int j = 0; j <= k; ++j) n -= N.col(j).dot(n) * N.col(j);
    N.col(k + 1) = n.normalized();
  }
  return N;
}

namespace {

bool fit_once(const MatX& O, MatX& tangent, VertexFit& fit) {
  const int k = static_cast<int>(O.rows());
  if (k < 5) return false;
  const MatX xi = O * tangent;
  const double s = std::sqrt(xi.rowwise().squaredNorm().mean());
  if (!(s > 0.0)) return false;
  MatX M(k, 5);
  for (int r = 0; r < k; ++r) {
    const double u = xi(r, 0) / s, w = xi(r, 1) / s;
    M.row(r) << u, w, 0.5 * u * u, u * w, 0.5 * w * w;
  }
  Eigen::CompleteOrthogonalDecomposition<MatX> cod(M);
  cod.setThreshold(1e-8);
  if (cod.rank() < 5) return false;
  const MatX P = cod.pseudoInverse();
  const MatX C = P * O;
  fit.A = C.topRows(2).transpose() / s;
  fit.Q[0] = C.row(2).transpose() / (s * s);
  fit.Q[1] = C.row(3).transpose() / (s * s);
  fit.Q[2] = C.row(4).transpose() / (s * s);
  fit.grad_weights = P.topRows(2) / s;
  tangent = orthonormal_pair(fit.A);
  fit.tangent = tangent;
  return true;
}

}  // namespace

std::vector<VertexFit> vertex_fits(const DiscreteImmersion& L, const FitOptions& opt) {
  const int V = L.num_vertices();
  std::vector<VertexFit> fits(V);
  for (int v = 0; v < V; ++v) {
    VertexFit& fit = fits[v];
    for (int attempt = 0; attempt < 2; ++attempt) {
      fit.two_ring = attempt == 1 || static_cast<int>(L.topo.vertex_neighbors[v].size()) < opt.min_one_ring;
      fit.stencil = fit.two_ring ? k_ring(L.topo, v, 2) : L.topo.vertex_neighbors[v];
      const int k = static_cast<int>(fit.stencil.size());
      const VecX xv = L.point(v);
      MatX O(k, L.target.dim());
      for (int r = 0; r < k; ++r)
        O.row(r) = L.target.to_frame(xv, L.target.diff(xv, L.point(fit.stencil[r]))).transpose();
      Eigen::JacobiSVD<MatX> svd(O, Eigen::ComputeThinV);
      MatX tangent = svd.matrixV().leftCols(2);
      bool ok = true;
      for (int p = 0; p < opt.passes && ok; ++p) ok = fit_once(O, tangent, fit);
      if (ok) break;
      if (fit.two_ring) throw DegeneracyError("rank-deficient quadratic fit at vertex " + std::to_string(v), v);
    }
  }
  return fits;
}

VecX surface_gradient(const VertexFit& fit, int v, const VecX& f) {
  VecX df(fit.stencil.size());
  for (size_t r = 0; r < fit.stencil.size(); ++r) df(r) = f(fit.stencil[r]) - f(v);
  const Vec2 dxi = fit.grad_weights * df;
  const Mat2 g = fit.A.transpose() * fit.A;
  return fit.A * g.inverse() * dxi;
}

SecondFundamentalForm second_fundamental_form(const DiscreteImmersion& L, const std::vector<VertexFit>& fits) {
  const int V = L.num_vertices();
  SecondFundamentalForm out;
  out.ii_norm2.resize(V);
  out.mean_curvature.resize(V);
  out.reeb_component.resize(V);
  for (int v = 0; v < V; ++v) {
    const VertexFit& fit = fits[v];
    if (fit.two_ring) out.two_ring_vertices.push_back(v);
    const MatX N = legendrian_normal_basis(L.target, L.point(v), fit.tangent);
    const Mat2 gi = (fit.A.transpose() * fit.A).inverse();
    VecX Nij[2][2];
    Nij[0][0] = N * (N.transpose() * fit.Q[0]);
    Nij[0][1] = Nij[1][0] = N * (N.transpose() * fit.Q[1]);
    Nij[1][1] = N * (N.transpose() * fit.Q[2]);
    double ii2 = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) ii2 += gi(i, k) * gi(j, l) * Nij[i][j].dot(Nij[k][l]);
    out.ii_norm2[v] = ii2;
    out.mean_curvature[v] = 0.5 * (gi(0, 0) * Nij[0][0] + 2.0 * gi(0, 1) * Nij[0][1] + gi(1, 1) * Nij[1][1]);
    double rc = 0.0;
    for (const auto& q : fit.Q) rc = std::max(rc, std::abs(N.col(0).dot(q)));
    out.reeb_component[v] = rc;
  }
  return out;
}

SecondFundamentalForm second_fundamental_form(const DiscreteImmersion& L) {
  return second_fundamental_form(L, vertex_fits(L));
}

std::vector<MatX> face_planes(const DiscreteImmersion& L, const std::vector<VertexFit>& fits) {
  std::vector<MatX> out(L.num_faces());
  for (int f = 0; f < L.num_faces(); ++f) {
    MatX P = MatX::Zero(L.target.dim(), L.target.dim());
    for (int c : L.mesh.triangles[f]) P += fits[c].tangent * fits[c].tangent.transpose();
    Eigen::SelfAdjointEigenSolver<MatX> es(P / 3.0);
    out[f] = es.eigenvectors().rightCols(2);
  }
  return out;
}

std::vector<std::complex<double>> hopf_differential(const DiscreteImmersion& L) {
  if (!L.mesh.has_uv()) throw ValidationError("hopf differential needs uv parameters");
  const auto frames = face_frames(L);
  std::vector<std::complex<double>> out(frames.size());
  for (size_t f = 0; f < frames.size(); ++f) {
    const auto& F = frames[f];
    out[f] = {(F.d1.squaredNorm() - F.d2.squaredNorm()) / 4.0, -F.d1.dot(F.d2) / 2.0};
  }
  return out;
}

double dirichlet_energy(const DiscreteImmersion& L) {
  if (!L.mesh.has_uv()) throw ValidationError("dirichlet energy needs uv parameters");
  const auto frames = face_frames(L);
  double E = 0.0;
  for (int f = 0; f < L.num_faces(); ++f) {
    const auto c = L.mesh.face_uv(f);
    Mat2 U;
    U << c[1] - c[0], c[2] - c[0];
    E += 0.25 * (frames[f].d1.squaredNorm() + frames[f].d2.squaredNorm()) * std::abs(U.determinant());
  }
  return E;
}

CotanData cotan_weights(const DiscreteImmersion& L) {
  CotanData cd;
  cd.edge_weight.assign(L.topo.num_edges(), 0.0);
  cd.vertex_area.assign(L.num_vertices(), 0.0);
  VecD e1, e2;
  for (int f = 0; f < L.num_faces(); ++f) {
    face_chords(L, f, e1, e2);
    const VecD e3 = e2 - e1;
    const double n = std::sqrt(std::max(e1.squaredNorm() * e2.squaredNorm() - std::pow(e1.dot(e2), 2), 0.0));
    if (!(n > 0.0)) throw DegeneracyError("degenerate face " + std::to_string(f), f);
    const auto& fe = L.topo.face_edges[f];
    cd.edge_weight[fe[1]] += 0.5 * e1.dot(e2) / n;
    cd.edge_weight[fe[2]] += 0.5 * (-e1).dot(e3) / n;
    cd.edge_weight[fe[0]] += 0.5 * e2.dot(e3) / n;
    for (int c : L.mesh.triangles[f]) cd.vertex_area[c] += n / 6.0;
  }
  return cd;
}

std::vector<double> cotan_divergence(const DiscreteImmersion& L, const CotanData& cot,
                                     const std::vector<double>& form) {
  std::vector<double> div(L.num_vertices(), 0.0);
  for (int e = 0; e < L.topo.num_edges(); ++e) {
    const auto [a, b] = L.topo.edges[e];
    div[a] += cot.edge_weight[e] * form[e];
    div[b] -= cot.edge_weight[e] * form[e];
  }
  for (int v = 0; v < L.num_vertices(); ++v) div[v] /= cot.vertex_area[v];
  return div;
}

namespace {

struct TreeCotree {
  std::vector<int> order;        // BFS order of vertices
  std::vector<int> parent_edge;  // -1 at roots
  std::vector<int> generators;   // edges in neither tree
};

TreeCotree tree_cotree(const MeshTopology& topo, int num_faces) {
  const int V = static_cast<int>(topo.vertex_neighbors.size());
  const int E = topo.num_edges();
  TreeCotree tc;
  tc.parent_edge.assign(V, -1);
  std::vector<char> in_tree(E, 0), visited(V, 0);
  for (int root = 0; root < V; ++root) {
    if (visited[root]) continue;
    visited[root] = 1;
    std::queue<int> q;
    q.push(root);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      tc.order.push_back(u);
      for (int w : topo.vertex_neighbors[u]) {
        if (visited[w]) continue;
        const int e = topo.edge_index(u, w);
        visited[w] = 1;
        in_tree[e] = 1;
        tc.parent_edge[w] = e;
        q.push(w);
      }
    }
  }
  // Dual tree over faces; boundary edges connect to one virtual face.
  const int virt = num_faces;
  std::vector<char> fvis(num_faces + 1, 0), in_cotree(E, 0);
  std::vector<std::vector<std::pair<int, int>>> fadj(num_faces + 1);
  for (int e = 0; e < E; ++e) {
    if (in_tree[e]) continue;
    const int f0 = topo.edge_faces[e][0] >= 0 ? topo.edge_faces[e][0] : virt;
    const int f1 = topo.edge_faces[e][1] >= 0 ? topo.edge_faces[e][1] : virt;
    fadj[f0].emplace_back(f1, e);
    fadj[f1].emplace_back(f0, e);
  }
  for (int root = 0; root <= num_faces; ++root) {
    if (fvis[root]) continue;
    fvis[root] = 1;
    std::queue<int> q;
    q.push(root);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (const auto& [w, e] : fadj[u])
        if (!fvis[w]) {
          fvis[w] = 1;
          in_cotree[e] = 1;
          q.push(w);
        }
    }
  }
  for (int e = 0; e < E; ++e)
    if (!in_tree[e] && !in_cotree[e]) tc.generators.push_back(e);
  return tc;
}

}  // namespace

void integrate_one_form(const MeshTopology& topo, int num_faces, const std::vector<double>& form,
                        std::vector<double>& potential, std::vector<double>& periods) {
  const TreeCotree tc = tree_cotree(topo, num_faces);
  potential.assign(topo.vertex_neighbors.size(), 0.0);
  for (int w : tc.order) {
    const int e = tc.parent_edge[w];
    if (e < 0) continue;
    const auto [a, b] = topo.edges[e];
    potential[w] = a == w ? potential[b] - form[e] : potential[a] + form[e];
  }
  periods.clear();
  for (int e : tc.generators) {
    const auto [a, b] = topo.edges[e];
    periods.push_back(potential[a] + form[e] - potential[b]);
  }
}

std::vector<std::vector<double>> period_functionals(const MeshTopology& topo, int num_faces) {
  const TreeCotree tc = tree_cotree(topo, num_faces);
  const int E = topo.num_edges();
  std::vector<std::vector<double>> out;
  // Potential at v is the signed sum of forms along the tree path from its root.
  auto add_path = [&](std::vector<double>& row, int v, double sign) {
    while (tc.parent_edge[v] >= 0) {
      const int e = tc.parent_edge[v];
      const auto [a, b] = topo.edges[e];
      if (b == v) {
        row[e] += sign;
        v = a;
      } else {
        row[e] -= sign;
        v = b;
      }
    }
  };
  for (int e : tc.generators) {
    std::vector<double> row(E, 0.0);
    const auto [a, b] = topo.edges[e];
    row[e] += 1.0;
    add_path(row, a, 1.0);
    add_path(row, b, -1.0);
    out.push_back(std::move(row));
  }
  return out;
}

MeanCurvatureForm mean_curvature_one_form(const DiscreteImmersion& L, const SecondFundamentalForm& II) {
  MeanCurvatureForm out;
  const int E = L.topo.num_edges();
  out.gamma.resize(E);
  for (int e = 0; e < E; ++e) {
    const auto [a, b] = L.topo.edges[e];
    const VecD d = edge_chord(L, a, b);
    const VecX JH = L.target.jh_frame(II.mean_curvature[a] + II.mean_curvature[b]);
    out.gamma[e] = -d.dot(JH);
  }
  const auto areas = face_areas(L);
  out.curl.resize(L.num_faces());
  for (int f = 0; f < L.num_faces(); ++f) {
    const auto& t = L.mesh.triangles[f];
    double c = 0.0;
    for (int k = 0; k < 3; ++k) {
      const int e = L.topo.face_edges[f][k];
      c += L.topo.edges[e][0] == t[k] ? out.gamma[e] : -out.gamma[e];
    }
    out.curl[f] = c / areas[f];
    out.max_curl = std::max(out.max_curl, std::abs(out.curl[f]));
  }
  std::vector<double> dbeta(E);
  for (int e = 0; e < E; ++e) dbeta[e] = 0.5 * out.gamma[e];
  integrate_one_form(L.topo, L.num_faces(), dbeta, out.beta, out.periods);
  out.laplacian_beta = cotan_divergence(L, cotan_weights(L), dbeta);
  double s2 = 0.0;
  int n = 0;
  for (int v = 0; v < L.num_vertices(); ++v) {
    if (L.topo.boundary_vertex[v]) continue;
    out.max_laplacian = std::max(out.max_laplacian, std::abs(out.laplacian_beta[v]));
    s2 += out.laplacian_beta[v] * out.laplacian_beta[v];
    ++n;
  }
  out.rms_laplacian = n > 0 ? std::sqrt(s2 / n) : 0.0;
  return out;
}

}  // namespace leg
