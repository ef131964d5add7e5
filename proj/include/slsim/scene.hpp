#ifndef SLSIM_SCENE_HPP
#define SLSIM_SCENE_HPP

#include "slsim/geometry.hpp"
#include "slsim/mesh.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace slsim
{

struct Instance
{
    std::shared_ptr< const Mesh > mesh;
    Pose pose = Pose::Identity(); // world_from_object
    Material material;
    /// The object of interest; clutter placement keeps clear of it.
    bool is_target = false;
};

struct Light
{
    enum class Kind
    {
        point,
        directional
    };
    Kind kind = Kind::point;
    Vec3 position = Vec3::Zero();         // point lights
    Vec3 direction = Vec3(0, 0, 1);       // directional lights: direction the light travels
    double intensity = 0.0;               // irradiance at 1 m (point) or constant irradiance (directional)
};

struct Scene
{
    std::vector< Instance > instances;
    /// Uniform IR irradiance reaching every surface regardless of occlusion.
    double ambient = 0.0;
    std::vector< Light > lights;

    [[nodiscard]] Aabb bounds() const;
    [[nodiscard]] std::optional< Aabb > target_bounds() const;
};

/// Throws ConfigError when a pose is not rigid or a material is out of range.
void validate(const Scene& scene);

struct Hit
{
    Vec3 point;
    Vec3 normal;           // shading normal, facing the incoming ray
    Vec3 geometric_normal; // facing the incoming ray
    const Material* material = nullptr;
    Vec2 uv = Vec2::Zero();
    double distance = 0.0;
    int instance = -1;
    int triangle = -1; // index within the instance mesh
};

/// Flattened world-space triangles behind a median-split BVH. Immutable after construction
/// and safe for concurrent queries.
class AcceleratedScene
{
  public:
    static constexpr double kMinDistance = 1e-6;

    AcceleratedScene() = default;
    explicit AcceleratedScene(Scene scene);

    [[nodiscard]] std::optional< Hit > intersect(const Ray& ray) const;
    /// True when anything lies on the ray strictly between kMinDistance and `max_distance`.
    [[nodiscard]] bool occluded(const Ray& ray, double max_distance) const;

    [[nodiscard]] const Scene& scene() const { return scene_; }
    [[nodiscard]] std::size_t triangle_count() const { return tris_.size(); }
    [[nodiscard]] std::size_t node_count() const { return nodes_.size(); }

  private:
    struct Tri
    {
        Vec3 v0, e1, e2;
        int instance;
        int local;
    };
    struct Node
    {
        Aabb box;
        int left = -1; // right child for internal nodes, first triangle for leaves
        int count = 0; // > 0 for leaves
    };

    int build(int first, int count, std::vector< Vec3 >& centroids);
    template < bool AnyHit >
    bool traverse(const Ray& ray, double t_max, int& tri_out, double& t_out, double& u_out, double& v_out) const;
    Hit shade(const Ray& ray, int tri, double t, double u, double v) const;

    Scene scene_;
    std::vector< Tri > tris_;
    std::vector< Node > nodes_;
};

AcceleratedScene build_accelerator(Scene scene);

/// Möller–Trumbore; returns the parametric distance (and barycentrics) when the ray hits in (t_min, t_max).
inline bool intersect_triangle(const Ray& ray, const Vec3& v0, const Vec3& e1, const Vec3& e2, double t_min,
                               double t_max, double& t, double& u, double& v)
{
    const Vec3 p = ray.direction.cross(e2);
    const double det = e1.dot(p);
    if (std::abs(det) < 1e-14)
        return false;
    const double inv = 1.0 / det;
    const Vec3 s = ray.origin - v0;
    u = s.dot(p) * inv;
    if (u < 0.0 || u > 1.0)
        return false;
    const Vec3 q = s.cross(e1);
    v = ray.direction.dot(q) * inv;
    if (v < 0.0 || u + v > 1.0)
        return false;
    t = e2.dot(q) * inv;
    return t > t_min && t < t_max;
}

} // namespace slsim

#endif // SLSIM_SCENE_HPP
