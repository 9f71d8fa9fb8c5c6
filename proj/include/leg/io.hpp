#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "leg/heisenberg.hpp"
#include "leg/immersion.hpp"

namespace leg {

using json = nlohmann::json;

inline constexpr const char* kLibraryVersion = LEG_VERSION;

// Mesh JSON: {target, phi_period, legendrian_tol, num_vertices, triangles,
// positions, uv?, uv_period, genus, boundary_loops, metadata?}.
json mesh_to_json(const DiscreteImmersion& L, const json& metadata = json::object());
DiscreteImmersion mesh_from_json(const json& j);

// Grid JSON: {n1, n2, h1, h2, periodic: [bool, bool], u: [[y1..y4], ...]} row-major.
json grid_to_json(const LagrangianSampleGrid& g);
LagrangianSampleGrid grid_from_json(const json& j);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

// 16 hex digits of FNV-1a over the compact dump (keys sorted).
std::string config_hash(const json& config);

// CSV with one leading comment line "# <header json>".
void write_csv(const std::string& path, const json& header, const std::vector<std::string>& columns,
               const std::vector<std::vector<json>>& rows);

// Appends records to a JSONL stream, one compact object per line.
class JsonlWriter {
 public:
  explicit JsonlWriter(const std::string& path);
  ~JsonlWriter();
  JsonlWriter(const JsonlWriter&) = delete;
  JsonlWriter& operator=(const JsonlWriter&) = delete;
  void write(const json& record);

 private:
  std::ofstream* out_;
};

}  // namespace leg
