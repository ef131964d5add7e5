#include "slsim/compositor.hpp"

#include "slsim/error.hpp"
#include "slsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

namespace slsim
{
namespace
{

Mat3 random_rotation(Rng& rng)
{
    // Uniform unit quaternion (Shoemake).
    const double u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
    const double a = std::sqrt(1 - u1), b = std::sqrt(u1);
    Eigen::Quaterniond q(b * std::cos(2 * std::numbers::pi * u3), a * std::sin(2 * std::numbers::pi * u2),
                         a * std::cos(2 * std::numbers::pi * u2), b * std::sin(2 * std::numbers::pi * u3));
    return q.normalized().toRotationMatrix();
}

Aabb world_bounds(const Mesh& mesh, const Pose& pose)
{
    Aabb box;
    for (const auto& v : mesh.vertices)
        box.extend(pose * v);
    return box;
}

} // namespace

Scene add_primitive_clutter(const Scene& scene, int count, const Aabb& bounds, std::uint64_t seed)
{
    if (count < 0)
        throw ConfigError("clutter count must be non-negative");
    if (count == 0)
        return scene;
    if (bounds.empty() || (bounds.extent().array() <= 0).any())
        throw ConfigError("clutter bounds are degenerate");

    Scene out = scene;
    const auto target = scene.target_bounds();
    Rng rng(seed);
    const double max_size = 0.25 * bounds.extent().minCoeff();
    constexpr int kAttempts = 1000;

    for (int n = 0; n < count; ++n)
    {
        bool placed = false;
        for (int attempt = 0; attempt < kAttempts && !placed; ++attempt)
        {
            const int kind = int(rng.index(3));
            const double s = rng.uniform(0.2, 1.0) * max_size;
            Mesh mesh;
            if (kind == 0)
                mesh = make_box(Vec3(s * rng.uniform(0.3, 1.0), s * rng.uniform(0.3, 1.0), s * rng.uniform(0.3, 1.0)));
            else if (kind == 1)
                mesh = make_uv_sphere(0.5 * s, 8, 16);
            else
                mesh = make_cylinder(0.5 * s * rng.uniform(0.3, 1.0), s, 16);

            Pose pose = Pose::Identity();
            pose.linear() = random_rotation(rng);
            pose.translation() = Vec3(rng.uniform(bounds.lo.x(), bounds.hi.x()), rng.uniform(bounds.lo.y(), bounds.hi.y()),
                                      rng.uniform(bounds.lo.z(), bounds.hi.z()));
            Material mat;
            mat.albedo = rng.uniform(0.2, 0.95);
            mat.reflectance_ratio = rng.uniform(0.0, 0.3);
            mat.roughness = rng.uniform(0.2, 1.0);

            const Aabb box = world_bounds(mesh, pose);
            if (!bounds.contains(box) || (target && box.overlaps(*target)))
                continue;
            out.instances.push_back({std::make_shared< const Mesh >(std::move(mesh)), pose, mat, false});
            placed = true;
        }
        if (!placed)
            throw ConfigError("could not place clutter primitive inside bounds clear of the target");
    }
    return out;
}

DepthMap blend_real_background(const DepthMap& foreground, const DepthMap& background)
{
    if (foreground.rows() != background.rows() || foreground.cols() != background.cols())
        throw DimensionError("foreground and background depth resolutions differ");
    DepthMap out = foreground;
    for (Eigen::Index i = 0; i < out.values.size(); ++i)
    {
        const bool fg = foreground.valid.data()[i], bg = background.valid.data()[i];
        if (bg && (!fg || background.values.data()[i] < foreground.values.data()[i]))
        {
            out.values.data()[i] = background.values.data()[i];
            out.valid.data()[i] = true;
        }
    }
    return out;
}

Scene move_background(const Scene& scene, const Vec3& velocity_per_frame, int frame)
{
    Scene out = scene;
    for (auto& inst : out.instances)
        if (!inst.is_target)
            inst.pose.pretranslate(velocity_per_frame * frame);
    return out;
}

} // namespace slsim
