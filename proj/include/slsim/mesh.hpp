#ifndef SLSIM_MESH_HPP
#define SLSIM_MESH_HPP

#include "slsim/geometry.hpp"
#include "slsim/image.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace slsim
{

/// Tangent-space normal map; channels hold components in [-1, 1].
struct NormalMap
{
    ImageF x, y, z;
    /// How many times the texture repeats over the unit UV square.
    double tiling = 1.0;

    [[nodiscard]] Vec3 sample(const Vec2& uv) const;
    static NormalMap from_rgb(const ImageF& r, const ImageF& g, const ImageF& b);
};

struct Mesh
{
    std::vector< Vec3 > vertices;
    std::vector< Eigen::Vector3i > triangles;
    std::vector< Vec3 > face_normals;   // one per triangle, always populated
    std::vector< Vec3 > vertex_normals; // empty → flat shading
    std::vector< Vec2 > uvs;            // empty or one per vertex
    std::shared_ptr< const NormalMap > normal_map;

    [[nodiscard]] Aabb bounds() const;
    [[nodiscard]] std::size_t size() const { return triangles.size(); }
};

/// Throws FormatError on out-of-range indices, NaN coordinates or non-unit normals.
void validate(const Mesh& mesh);

/// Recomputes face normals from winding (counter-clockwise = front).
void compute_face_normals(Mesh& mesh);

/// Removes zero-area triangles; returns how many were dropped.
std::size_t drop_degenerate(Mesh& mesh, double min_area = 1e-14);

void scale(Mesh& mesh, double factor);
[[nodiscard]] Mesh transformed(const Mesh& mesh, const Pose& pose);

struct Material
{
    double albedo = 0.8;
    /// Fraction of the response taken by the specular lobe.
    double reflectance_ratio = 0.0;
    double roughness = 0.5;
    std::shared_ptr< const ImageF > albedo_map; // modulates albedo through UVs when present

    [[nodiscard]] bool valid() const
    {
        return albedo >= 0.0 && albedo <= 1.0 && reflectance_ratio >= 0.0 && reflectance_ratio <= 1.0 &&
               roughness > 0.0 && roughness <= 1.0;
    }
};

// Primitive builders, unit-centered at the origin.
Mesh make_box(const Vec3& size);
Mesh make_uv_sphere(double radius, int stacks = 12, int slices = 24);
Mesh make_cylinder(double radius, double height, int slices = 24);
/// Two-triangle rectangle in the local xy-plane facing -z.
Mesh make_quad(double width, double height);

} // namespace slsim

#endif // SLSIM_MESH_HPP
