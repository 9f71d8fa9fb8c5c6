#pragma once

#include <array>
#include <vector>

#include "leg/linalg.hpp"

namespace leg {

// Oriented triangle mesh. uv is optional; when uv_period[k] > 0 the k-th
// parameter is periodic and face corners are unwrapped relative to corner 0.
struct SurfaceMesh {
  int num_vertices = 0;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Vec2> uv;
  std::array<double, 2> uv_period{0.0, 0.0};
  int genus = 0;
  std::vector<std::vector<int>> boundary_loops;

  bool has_uv() const { return !uv.empty(); }
  int num_faces() const { return static_cast<int>(triangles.size()); }
  std::array<Vec2, 3> face_uv(int f) const;
};

struct MeshTopology {
  // Undirected edges with v[0] < v[1].
  std::vector<std::array<int, 2>> edges;
  // Face on each side; -1 marks a boundary side. faces[0] traverses v0 -> v1.
  std::vector<std::array<int, 2>> edge_faces;
  // face_edges[f][k] joins corners k and k+1.
  std::vector<std::array<int, 3>> face_edges;
  std::vector<std::vector<int>> vertex_neighbors;
  std::vector<std::vector<int>> vertex_faces;
  std::vector<char> boundary_vertex;
  std::vector<std::vector<int>> boundary_loops;
  int euler_characteristic = 0;
  int num_components = 0;

  int num_edges() const { return static_cast<int>(edges.size()); }
  bool interior_edge(int e) const { return edge_faces[e][0] >= 0 && edge_faces[e][1] >= 0; }
  int edge_index(int a, int b) const;

  // Validates orientability, manifoldness and the declared genus; throws ValidationError.
  static MeshTopology build(const SurfaceMesh& mesh);

 private:
  std::vector<std::vector<std::pair<int, int>>> vertex_edges_;
};

// Vertices within k rings of v (excluding v), in BFS order.
std::vector<int> k_ring(const MeshTopology& topo, int v, int k);

}  // namespace leg
