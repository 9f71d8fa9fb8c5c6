#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "leg/mesh.hpp"
#include "leg/target.hpp"

namespace leg {

struct DiscreteImmersion {
  SurfaceMesh mesh;
  MeshTopology topo;
  Target target;
  MatX positions;  // one row per vertex, target coordinates
  double legendrian_tol = 1e-8;

  // Builds topology and checks the point invariants; throws ValidationError.
  static DiscreteImmersion create(SurfaceMesh mesh, Target target, MatX positions, double legendrian_tol = 1e-8);

  int num_vertices() const { return mesh.num_vertices; }
  int num_faces() const { return mesh.num_faces(); }
  VecX point(int v) const { return positions.row(v).transpose(); }
};

// Chord vectors of face f (corner 0 -> 1 and corner 0 -> 2) in frame components
// at the face centroid.
void face_chords(const DiscreteImmersion& L, int f, VecD& e1, VecD& e2);
// Chord a -> b in frame components at the edge midpoint.
VecD edge_chord(const DiscreteImmersion& L, int a, int b);

struct FaceFrame {
  VecX d1, d2;  // affine partials (w.r.t. uv when present, else w.r.t. the edge reference triangle)
  Mat2 g;
  double area = 0.0;
  double conformal_factor = 0.0;  // sqrt(det g)
  VecX T;                         // unit Gauss 2-vector, lexicographic pairs i < j
  MatX normal_basis;              // orthonormal columns: R/|R|, J e1, J e2
};

std::vector<FaceFrame> face_frames(const DiscreteImmersion& L);
std::vector<double> face_areas(const DiscreteImmersion& L);
double total_area(const DiscreteImmersion& L);

// alpha at the retracted midpoint applied to q - p.
double edge_residual(const Target& t, const VecX& p, const VecX& q);

struct LegendrianResidual {
  std::vector<double> edge;  // oriented from edges[e][0] to edges[e][1]
  double max_abs = 0.0;
  double rms = 0.0;
};
LegendrianResidual legendrian_residual(const DiscreteImmersion& L);

// Local quadratic fit at a vertex in frame coordinates at that vertex.
struct VertexFit {
  MatX tangent;            // D x 2, orthonormal
  MatX A;                  // D x 2, first partials in fit coordinates
  std::array<VecX, 3> Q;   // second partials 11, 12, 22
  MatX grad_weights;       // 2 x k, d_xi f = grad_weights * (f[stencil] - f[v])
  std::vector<int> stencil;
  bool two_ring = false;
};

struct FitOptions {
  int min_one_ring = 5;
  int passes = 3;
};

std::vector<VertexFit> vertex_fits(const DiscreteImmersion& L, const FitOptions& opt = {});

// Surface gradient (frame components at the vertex) of vertex values f.
VecX surface_gradient(const VertexFit& fit, int v, const VecX& f);

struct SecondFundamentalForm {
  std::vector<double> ii_norm2;
  std::vector<VecX> mean_curvature;  // H = 1/2 g^ij N_ij, frame components at the vertex
  std::vector<double> reeb_component;
  std::vector<int> two_ring_vertices;  // fit-rank warnings
};

SecondFundamentalForm second_fundamental_form(const DiscreteImmersion& L, const std::vector<VertexFit>& fits);
SecondFundamentalForm second_fundamental_form(const DiscreteImmersion& L);

// Orthonormal normal basis R/|R|, J e1, J e2 for an orthonormal tangent basis.
MatX legendrian_normal_basis(const Target& t, const VecX& q, const MatX& tangent);

// Per-face tangent plane from the averaged vertex-fit projectors (D x 2).
std::vector<MatX> face_planes(const DiscreteImmersion& L, const std::vector<VertexFit>& fits);

std::vector<std::complex<double>> hopf_differential(const DiscreteImmersion& L);
// 1/2 sum |d Lambda|^2 in uv coordinates.
double dirichlet_energy(const DiscreteImmersion& L);

struct CotanData {
  std::vector<double> edge_weight;  // (cot a + cot b) / 2
  std::vector<double> vertex_area;  // barycentric
};
CotanData cotan_weights(const DiscreteImmersion& L);

struct MeanCurvatureForm {
  std::vector<double> gamma;     // per oriented edge
  std::vector<double> curl;      // per face, circulation / area
  std::vector<double> beta;      // integrated over a BFS tree of dbeta = gamma / 2
  std::vector<double> periods;   // of beta along homology generators
  std::vector<double> laplacian_beta;  // per vertex, cotangent divergence of dbeta
  double max_curl = 0.0;
  double max_laplacian = 0.0;  // over interior vertices
  double rms_laplacian = 0.0;
};

MeanCurvatureForm mean_curvature_one_form(const DiscreteImmersion& L, const SecondFundamentalForm& II);

// Integrates an edge one-form (oriented as topo.edges) over a BFS tree rooted at
// vertex 0 of each component; returns vertex potentials and the periods of the
// non-tree, non-cotree generators.
void integrate_one_form(const MeshTopology& topo, int num_faces, const std::vector<double>& form,
                        std::vector<double>& potential, std::vector<double>& periods);

// Row k maps an edge one-form to its k-th period, as returned by integrate_one_form.
std::vector<std::vector<double>> period_functionals(const MeshTopology& topo, int num_faces);

// Divergence of an edge one-form against cotangent weights, divided by vertex area.
std::vector<double> cotan_divergence(const DiscreteImmersion& L, const CotanData& cot, const std::vector<double>& form);

}  // namespace leg
