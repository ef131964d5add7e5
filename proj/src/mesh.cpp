#include "slsim/mesh.hpp"

#include "slsim/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace slsim
{

Vec3 NormalMap::sample(const Vec2& uv) const
{
    if (x.size() == 0)
        return Vec3::UnitZ();
    const double w = double(x.cols());
    const double h = double(x.rows());
    double u = uv.x() * tiling;
    double v = uv.y() * tiling;
    u -= std::floor(u);
    v -= std::floor(v);
    const double px = u * w - 0.5;
    const double py = v * h - 0.5;
    Vec3 n(sample_bilinear(x, px, py, 0.0), sample_bilinear(y, px, py, 0.0), sample_bilinear(z, px, py, 1.0));
    const double len = n.norm();
    return len > 0 ? Vec3(n / len) : Vec3::UnitZ();
}

NormalMap NormalMap::from_rgb(const ImageF& r, const ImageF& g, const ImageF& b)
{
    NormalMap m;
    m.x = 2.0 * r - 1.0;
    m.y = 2.0 * g - 1.0;
    m.z = 2.0 * b - 1.0;
    return m;
}

Aabb Mesh::bounds() const
{
    Aabb box;
    for (const auto& v : vertices)
        box.extend(v);
    return box;
}

void validate(const Mesh& mesh)
{
    const auto n = static_cast< int >(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
        if (!mesh.vertices[i].allFinite())
        {
            std::ostringstream msg;
            msg << "vertex " << i << " has a non-finite coordinate";
            throw FormatError(msg.str());
        }
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
        for (int k = 0; k < 3; ++k)
            if (mesh.triangles[t][k] < 0 || mesh.triangles[t][k] >= n)
            {
                std::ostringstream msg;
                msg << "triangle " << t << " references vertex " << mesh.triangles[t][k] << " of " << n;
                throw FormatError(msg.str());
            }
    if (mesh.face_normals.size() != mesh.triangles.size())
        throw FormatError("face normal count does not match triangle count");
    if (!mesh.vertex_normals.empty() && mesh.vertex_normals.size() != mesh.vertices.size())
        throw FormatError("vertex normal count does not match vertex count");
    if (!mesh.uvs.empty() && mesh.uvs.size() != mesh.vertices.size())
        throw FormatError("uv count does not match vertex count");
    auto check_unit = [](const std::vector< Vec3 >& normals, const char* what) {
        for (std::size_t i = 0; i < normals.size(); ++i)
            if (!(std::abs(normals[i].norm() - 1.0) <= 1e-6))
            {
                std::ostringstream msg;
                msg << what << " normal " << i << " is not unit length";
                throw FormatError(msg.str());
            }
    };
    check_unit(mesh.face_normals, "face");
    check_unit(mesh.vertex_normals, "vertex");
}

void compute_face_normals(Mesh& mesh)
{
    mesh.face_normals.resize(mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    {
        const auto& tri = mesh.triangles[t];
        const Vec3 c = (mesh.vertices[tri[1]] - mesh.vertices[tri[0]]).cross(mesh.vertices[tri[2]] - mesh.vertices[tri[0]]);
        const double len = c.norm();
        mesh.face_normals[t] = len > 0 ? Vec3(c / len) : Vec3::UnitZ();
    }
}

std::size_t drop_degenerate(Mesh& mesh, double min_area)
{
    std::vector< Eigen::Vector3i > kept;
    kept.reserve(mesh.triangles.size());
    std::vector< Vec3 > kept_normals;
    const bool has_normals = mesh.face_normals.size() == mesh.triangles.size();
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    {
        const auto& tri = mesh.triangles[t];
        const double area =
            0.5 * (mesh.vertices[tri[1]] - mesh.vertices[tri[0]]).cross(mesh.vertices[tri[2]] - mesh.vertices[tri[0]]).norm();
        if (area > min_area)
        {
            kept.push_back(tri);
            if (has_normals)
                kept_normals.push_back(mesh.face_normals[t]);
        }
    }
    const std::size_t dropped = mesh.triangles.size() - kept.size();
    mesh.triangles = std::move(kept);
    if (has_normals)
        mesh.face_normals = std::move(kept_normals);
    return dropped;
}

void scale(Mesh& mesh, double factor)
{
    for (auto& v : mesh.vertices)
        v *= factor;
    if (factor < 0)
        compute_face_normals(mesh);
}

Mesh transformed(const Mesh& mesh, const Pose& pose)
{
    Mesh out = mesh;
    for (auto& v : out.vertices)
        v = pose * v;
    const Mat3 r = pose.linear();
    for (auto& n : out.face_normals)
        n = (r * n).normalized();
    for (auto& n : out.vertex_normals)
        n = (r * n).normalized();
    return out;
}

Mesh make_box(const Vec3& size)
{
    Mesh m;
    const Vec3 h = 0.5 * size;
    for (int i = 0; i < 8; ++i)
        m.vertices.emplace_back((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(), (i & 4) ? h.z() : -h.z());
    // Outward-facing, counter-clockwise seen from outside.
    const int quads[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
    for (const auto& q : quads)
    {
        m.triangles.emplace_back(q[0], q[1], q[2]);
        m.triangles.emplace_back(q[0], q[2], q[3]);
    }
    compute_face_normals(m);
    return m;
}

Mesh make_uv_sphere(double radius, int stacks, int slices)
{
    Mesh m;
    for (int i = 0; i <= stacks; ++i)
    {
        const double theta = std::numbers::pi * i / stacks;
        for (int j = 0; j <= slices; ++j)
        {
            const double phi = 2.0 * std::numbers::pi * j / slices;
            const Vec3 n(std::sin(theta) * std::cos(phi), std::cos(theta), std::sin(theta) * std::sin(phi));
            m.vertices.push_back(radius * n);
            m.vertex_normals.push_back(n);
            m.uvs.emplace_back(double(j) / slices, double(i) / stacks);
        }
    }
    const int row = slices + 1;
    for (int i = 0; i < stacks; ++i)
        for (int j = 0; j < slices; ++j)
        {
            const int a = i * row + j, b = a + row, c = b + 1, d = a + 1;
            if (i != 0)
                m.triangles.emplace_back(a, d, b);
            if (i != stacks - 1)
                m.triangles.emplace_back(d, c, b);
        }
    compute_face_normals(m);
    return m;
}

Mesh make_cylinder(double radius, double height, int slices)
{
    Mesh m;
    const double h = 0.5 * height;
    for (int j = 0; j < slices; ++j)
    {
        const double phi = 2.0 * std::numbers::pi * j / slices;
        m.vertices.emplace_back(radius * std::cos(phi), -h, radius * std::sin(phi));
        m.vertices.emplace_back(radius * std::cos(phi), h, radius * std::sin(phi));
    }
    const int bottom = static_cast< int >(m.vertices.size());
    m.vertices.emplace_back(0, -h, 0);
    const int top = bottom + 1;
    m.vertices.emplace_back(0, h, 0);
    for (int j = 0; j < slices; ++j)
    {
        const int a = 2 * j, b = a + 1, c = 2 * ((j + 1) % slices), d = c + 1;
        m.triangles.emplace_back(a, b, d);
        m.triangles.emplace_back(a, d, c);
        m.triangles.emplace_back(bottom, a, c);
        m.triangles.emplace_back(top, d, b);
    }
    compute_face_normals(m);
    return m;
}

Mesh make_quad(double width, double height)
{
    Mesh m;
    const double hw = 0.5 * width, hh = 0.5 * height;
    m.vertices = {{-hw, -hh, 0}, {hw, -hh, 0}, {hw, hh, 0}, {-hw, hh, 0}};
    m.uvs = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    m.triangles = {{0, 2, 1}, {0, 3, 2}};
    compute_face_normals(m);
    return m;
}

} // namespace slsim
