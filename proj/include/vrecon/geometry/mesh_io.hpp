#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vrecon/geometry/mesh.hpp"

namespace vrecon::geometry {

enum class MeshFormat { Obj, Stl, Ply };

// Picks the format from a file extension (.obj, .stl, .ply); throws Format otherwise.
MeshFormat format_from_path(const std::string& path);

// OBJ keeps "g"/"o" groups as face groups; STL is binary and welds exactly
// coincident vertices; PLY is binary little-endian. Malformed input throws
// ParseError (OBJ, line number) or DecodeError (STL/PLY, byte offset).
TriangleMesh load_mesh(std::span<const std::uint8_t> bytes, MeshFormat format);
std::vector<std::uint8_t> save_mesh(const TriangleMesh& mesh, MeshFormat format);

TriangleMesh load_mesh_file(const std::string& path);
void save_mesh_file(const TriangleMesh& mesh, const std::string& path);

}  // namespace vrecon::geometry
