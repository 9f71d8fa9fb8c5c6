#include "leg/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "leg/errors.hpp"

namespace leg {

namespace {

template <typename T>
T get(const json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

json mesh_to_json(const DiscreteImmersion& L, const json& metadata) {
  json j;
  j["target"] = to_string(L.target.kind);
  j["phi_period"] = L.target.phi_period;
  j["legendrian_tol"] = L.legendrian_tol;
  j["num_vertices"] = L.num_vertices();
  json tris = json::array();
  for (const auto& t : L.mesh.triangles) tris.push_back({t[0], t[1], t[2]});
  j["triangles"] = std::move(tris);
  json pos = json::array();
  for (int v = 0; v < L.num_vertices(); ++v) {
    json row = json::array();
    for (int k = 0; k < L.positions.cols(); ++k) row.push_back(L.positions(v, k));
    pos.push_back(std::move(row));
  }
  j["positions"] = std::move(pos);
  if (L.mesh.has_uv()) {
    json uv = json::array();
    for (const Vec2& p : L.mesh.uv) uv.push_back({p(0), p(1)});
    j["uv"] = std::move(uv);
  }
  j["uv_period"] = {L.mesh.uv_period[0], L.mesh.uv_period[1]};
  j["genus"] = L.mesh.genus;
  j["boundary_loops"] = L.mesh.boundary_loops;
  if (!metadata.empty()) j["metadata"] = metadata;
  return j;
}

DiscreteImmersion mesh_from_json(const json& j) {
  SurfaceMesh mesh;
  mesh.num_vertices = get<int>(j, "num_vertices");
  for (const auto& t : get<std::vector<std::array<int, 3>>>(j, "triangles")) mesh.triangles.push_back(t);
  if (j.contains("uv")) {
    for (const auto& p : get<std::vector<std::array<double, 2>>>(j, "uv")) mesh.uv.emplace_back(p[0], p[1]);
    if (static_cast<int>(mesh.uv.size()) != mesh.num_vertices) throw ValidationError("uv count mismatch");
  }
  if (j.contains("uv_period")) mesh.uv_period = get<std::array<double, 2>>(j, "uv_period");
  if (j.contains("genus")) mesh.genus = get<int>(j, "genus");
  if (j.contains("boundary_loops")) mesh.boundary_loops = get<std::vector<std::vector<int>>>(j, "boundary_loops");
  Target target;
  target.kind = target_from_string(get<std::string>(j, "target"));
  if (j.contains("phi_period")) target.phi_period = get<double>(j, "phi_period");
  const auto pos = get<std::vector<std::vector<double>>>(j, "positions");
  if (static_cast<int>(pos.size()) != mesh.num_vertices) throw ValidationError("position count mismatch");
  MatX X(mesh.num_vertices, target.dim());
  for (int v = 0; v < mesh.num_vertices; ++v) {
    if (static_cast<int>(pos[v].size()) != target.dim()) throw ValidationError("position row has wrong dimension");
    for (int k = 0; k < target.dim(); ++k) X(v, k) = pos[v][k];
  }
  const double tol = j.contains("legendrian_tol") ? get<double>(j, "legendrian_tol") : 1e-8;
  return DiscreteImmersion::create(std::move(mesh), target, std::move(X), tol);
}

json grid_to_json(const LagrangianSampleGrid& g) {
  json u = json::array();
  for (const Vec4& y : g.u) u.push_back({y(0), y(1), y(2), y(3)});
  return {{"n1", g.n1}, {"n2", g.n2}, {"h1", g.h1}, {"h2", g.h2},
          {"periodic", {g.periodic[0], g.periodic[1]}}, {"u", std::move(u)}};
}

LagrangianSampleGrid grid_from_json(const json& j) {
  LagrangianSampleGrid g;
  g.n1 = get<int>(j, "n1");
  g.n2 = get<int>(j, "n2");
  g.h1 = get<double>(j, "h1");
  g.h2 = get<double>(j, "h2");
  if (j.contains("periodic")) g.periodic = get<std::array<bool, 2>>(j, "periodic");
  if (g.n1 < 2 || g.n2 < 2 || !(g.h1 > 0.0) || !(g.h2 > 0.0)) throw ValidationError("grid needs n >= 2 and h > 0");
  const auto u = get<std::vector<std::array<double, 4>>>(j, "u");
  if (u.size() != static_cast<size_t>(g.n1) * g.n2) throw ValidationError("grid sample count mismatch");
  for (const auto& y : u) g.u.emplace_back(y[0], y[1], y[2], y[3]);
  return g;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

std::string config_hash(const json& config) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_csv(const std::string& path, const json& header, const std::vector<std::string>& columns,
               const std::vector<std::vector<json>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# " << header.dump() << '\n';
  for (size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "");
      if (row[i].is_string()) out << row[i].get<std::string>();
      else out << row[i].dump();
    }
    out << '\n';
  }
}

JsonlWriter::JsonlWriter(const std::string& path) : out_(new std::ofstream(path)) {
  if (!*out_) {
    delete out_;
    throw std::runtime_error("cannot write " + path);
  }
}

JsonlWriter::~JsonlWriter() { delete out_; }

void JsonlWriter::write(const json& record) {
  *out_ << record.dump() << '\n';
  out_->flush();
}

}  // namespace leg
