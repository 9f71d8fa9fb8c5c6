#include "leg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <string>

#include "leg/errors.hpp"

namespace leg {

std::array<Vec2, 3> SurfaceMesh::face_uv(int f) const {
  std::array<Vec2, 3> c;
  const auto& t = triangles[f];
  for (int k = 0; k < 3; ++k) c[k] = uv[t[k]];
  for (int k = 1; k < 3; ++k)
    for (int d = 0; d < 2; ++d) {
      const double P = uv_period[d];
      if (P > 0.0) c[k](d) -= P * std::round((c[k](d) - c[0](d)) / P);
    }
  return c;
}

int MeshTopology::edge_index(int a, int b) const {
  if (a > b) std::swap(a, b);
  for (const auto& [w, e] : vertex_edges_[a])
    if (w == b) return e;
  return -1;
}

MeshTopology MeshTopology::build(const SurfaceMesh& mesh) {
  MeshTopology t;
  const int V = mesh.num_vertices;
  const int F = mesh.num_faces();
  if (V <= 0 || F <= 0) throw ValidationError("empty mesh");
  if (mesh.has_uv() && static_cast<int>(mesh.uv.size()) != V) throw ValidationError("uv size mismatch");

  t.vertex_edges_.assign(V, {});
  t.face_edges.resize(F);
  t.vertex_faces.assign(V, {});
  std::map<std::pair<int, int>, int> directed;
  for (int f = 0; f < F; ++f) {
    const auto& tri = mesh.triangles[f];
    for (int k = 0; k < 3; ++k) {
      if (tri[k] < 0 || tri[k] >= V) throw ValidationError("triangle index out of range in face " + std::to_string(f));
      if (tri[k] == tri[(k + 1) % 3]) throw ValidationError("repeated vertex in face " + std::to_string(f));
      t.vertex_faces[tri[k]].push_back(f);
    }
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k], b = tri[(k + 1) % 3];
      if (!directed.emplace(std::make_pair(a, b), f).second)
        throw ValidationError("non-manifold or inconsistently oriented edge (" + std::to_string(a) + "," +
                              std::to_string(b) + ")");
      const int lo = std::min(a, b), hi = std::max(a, b);
      int e = t.edge_index(lo, hi);
      if (e < 0) {
        e = static_cast<int>(t.edges.size());
        t.edges.push_back({lo, hi});
        t.edge_faces.push_back({-1, -1});
        t.vertex_edges_[lo].emplace_back(hi, e);
      }
      t.edge_faces[e][a == lo ? 0 : 1] = f;
      t.face_edges[f][k] = e;
    }
  }

  t.vertex_neighbors.assign(V, {});
  t.boundary_vertex.assign(V, 0);
  std::vector<int> next_boundary(V, -1);
  for (int e = 0; e < t.num_edges(); ++e) {
    const auto [a, b] = t.edges[e];
    t.vertex_neighbors[a].push_back(b);
    t.vertex_neighbors[b].push_back(a);
    if (!t.interior_edge(e)) {
      t.boundary_vertex[a] = t.boundary_vertex[b] = 1;
      // Follow the boundary with the surface on the left.
      const bool forward = t.edge_faces[e][0] >= 0;
      const int from = forward ? a : b, to = forward ? b : a;
      if (next_boundary[from] >= 0) throw ValidationError("non-manifold boundary vertex " + std::to_string(from));
      next_boundary[from] = to;
    }
  }
  for (int v = 0; v < V; ++v) {
    if (t.vertex_neighbors[v].empty()) throw ValidationError("isolated vertex " + std::to_string(v));
    std::sort(t.vertex_neighbors[v].begin(), t.vertex_neighbors[v].end());
  }

  std::vector<char> seen(V, 0);
  for (int v = 0; v < V; ++v) {
    if (next_boundary[v] < 0 || seen[v]) continue;
    std::vector<int> loop;
    for (int w = v; !seen[w]; w = next_boundary[w]) {
      if (next_boundary[w] < 0) throw ValidationError("open boundary chain at vertex " + std::to_string(w));
      seen[w] = 1;
      loop.push_back(w);
    }
    t.boundary_loops.push_back(std::move(loop));
  }

  // Connected components through edges.
  std::vector<int> comp(V, -1);
  for (int v = 0; v < V; ++v) {
    if (comp[v] >= 0) continue;
    std::queue<int> q;
    q.push(v);
    comp[v] = t.num_components;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int w : t.vertex_neighbors[u])
        if (comp[w] < 0) {
          comp[w] = t.num_components;
          q.push(w);
        }
    }
    ++t.num_components;
  }

  t.euler_characteristic = V - t.num_edges() + F;
  const int b = static_cast<int>(t.boundary_loops.size());
  const int expected = 2 * t.num_components - 2 * mesh.genus - b;
  if (t.euler_characteristic != expected)
    throw ValidationError("Euler characteristic " + std::to_string(t.euler_characteristic) +
                          " inconsistent with genus " + std::to_string(mesh.genus) + " and " + std::to_string(b) +
                          " boundary loops");
  if (!mesh.boundary_loops.empty() && static_cast<int>(mesh.boundary_loops.size()) != b)
    throw ValidationError("declared boundary loops do not match the mesh");
  return t;
}

std::vector<int> k_ring(const MeshTopology& topo, int v, int k) {
  std::vector<int> out;
  std::map<int, int> depth{{v, 0}};
  std::queue<int> q;
  q.push(v);
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    if (depth[u] == k) continue;
    for (int w : topo.vertex_neighbors[u])
      if (depth.emplace(w, depth[u] + 1).second) {
        out.push_back(w);
        q.push(w);
      }
  }
  return out;
}

}  // namespace leg
