#ifndef SLSIM_MESH_IO_HPP
#define SLSIM_MESH_IO_HPP

#include "slsim/mesh.hpp"

#include <filesystem>
#include <optional>

namespace slsim
{

enum class MeshFormat
{
    obj,
    ply,
    stl
};

std::optional< MeshFormat > mesh_format_from_extension(const std::filesystem::path& path);

struct LoadedMesh
{
    Mesh mesh;
    std::size_t dropped_degenerate = 0;
};

/// Parses OBJ (polygons fan-triangulated), PLY (ascii / binary little- or big-endian) or STL (ascii / binary).
/// Vertex positions are multiplied by `unit_scale` so the result is in meters. Face normals are always
/// recomputed from winding; file-provided vertex normals are kept as shading normals.
/// Throws IoError when the file cannot be opened and FormatError (naming the line or byte offset) on parse failure.
LoadedMesh load_mesh(const std::filesystem::path& path, MeshFormat format, double unit_scale = 1.0);
LoadedMesh load_mesh(const std::filesystem::path& path, double unit_scale = 1.0);

} // namespace slsim

#endif // SLSIM_MESH_IO_HPP
