#include "slsim/viewpoints.hpp"

#include "slsim/error.hpp"
#include "slsim/rng.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace slsim
{

std::vector< Vec3 > icosphere_vertices(int subdivision)
{
    if (subdivision < 0 || subdivision > 7)
        throw ConfigError("icosphere subdivision must be in [0, 7]");
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector< Vec3 > v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                             {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    std::vector< Eigen::Vector3i > f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    for (auto& p : v)
        p.normalize();

    for (int level = 0; level < subdivision; ++level)
    {
        std::map< std::pair< int, int >, int > midpoints;
        auto midpoint = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            if (auto it = midpoints.find(key); it != midpoints.end())
                return it->second;
            v.push_back((v[std::size_t(a)] + v[std::size_t(b)]).normalized());
            const int id = int(v.size()) - 1;
            midpoints.emplace(key, id);
            return id;
        };
        std::vector< Eigen::Vector3i > next;
        next.reserve(f.size() * 4);
        for (const auto& tri : f)
        {
            const int a = midpoint(tri[0], tri[1]), b = midpoint(tri[1], tri[2]), c = midpoint(tri[2], tri[0]);
            next.emplace_back(tri[0], a, c);
            next.emplace_back(tri[1], b, a);
            next.emplace_back(tri[2], c, b);
            next.emplace_back(a, b, c);
        }
        f = std::move(next);
    }
    return v;
}

std::vector< Pose > sample_viewpoints(const ViewpointConfig& config, const Vec3& centroid, const DepthRange& range)
{
    if (!(config.radius_min_m > 0 && config.radius_min_m <= config.radius_max_m))
        throw ConfigError("viewpoint radius range is empty");
    if (config.radius_min_m < range.z_min || config.radius_max_m > range.z_max)
        throw ConfigError("viewpoint radius range leaves the sensor depth range");

    std::vector< Pose > poses;
    if (config.mode == ViewpointMode::icosphere)
    {
        const double r = 0.5 * (config.radius_min_m + config.radius_max_m);
        for (const Vec3& dir : icosphere_vertices(config.subdivision))
            poses.push_back(look_at(centroid + r * dir, centroid));
        return poses;
    }

    if (config.count < 0)
        throw ConfigError("viewpoint count must be non-negative");
    if (!(config.cap_half_angle_deg > 0 && config.cap_half_angle_deg <= 180) || !(config.cap_axis.norm() > 0))
        throw ConfigError("viewpoint cap must have a half-angle in (0, 180] and a nonzero axis");
    const Vec3 axis = config.cap_axis.normalized();
    const Vec3 helper = std::abs(axis.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 e1 = axis.cross(helper).normalized();
    const Vec3 e2 = axis.cross(e1);
    const double cos_cap = std::cos(config.cap_half_angle_deg * std::numbers::pi / 180.0);

    Rng rng(config.seed);
    for (int i = 0; i < config.count; ++i)
    {
        // Uniform on the cap: cos(polar angle) uniform in [cos_cap, 1].
        const double c = rng.uniform(cos_cap, 1.0);
        const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const Vec3 dir = c * axis + s * (std::cos(phi) * e1 + std::sin(phi) * e2);
        const double r = rng.uniform(config.radius_min_m, config.radius_max_m);
        poses.push_back(look_at(centroid + r * dir, centroid));
    }
    return poses;
}

} // namespace slsim
