#pragma once

#include "fbms/mesh.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace fbms {

// Line-oriented mesh format:
//   FBMS-MESH 1
//   v x y z        (one per vertex)
//   f i j k        (one per triangle, 0-based)
// Blank lines and '#' comments are ignored.
TriSurfaceMesh read_mesh(std::istream& in);
TriSurfaceMesh read_mesh(const std::filesystem::path& path);
void write_mesh(std::ostream& out, const TriSurfaceMesh& mesh);
void write_mesh(const std::filesystem::path& path, const TriSurfaceMesh& mesh);

// Per-vertex scalar field sidecar: header "FBMS-FIELD 1", then "s value" lines
// in vertex order.
std::vector<double> read_field(std::istream& in);
std::vector<double> read_field(const std::filesystem::path& path);
void write_field(std::ostream& out, const std::vector<double>& values);
void write_field(const std::filesystem::path& path, const std::vector<double>& values);

}  // namespace fbms
