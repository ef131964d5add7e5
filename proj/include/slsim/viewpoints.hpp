#ifndef SLSIM_VIEWPOINTS_HPP
#define SLSIM_VIEWPOINTS_HPP

#include "slsim/geometry.hpp"
#include "slsim/sensor_model.hpp"

#include <cstdint>
#include <vector>

namespace slsim
{

enum class ViewpointMode
{
    icosphere,
    random
};

struct ViewpointConfig
{
    ViewpointMode mode = ViewpointMode::icosphere;
    int subdivision = 0; // icosphere
    int count = 12;      // random
    double radius_min_m = 1.0;
    double radius_max_m = 1.5;
    /// Random mode draws directions uniformly over the cap of this half-angle around cap_axis.
    double cap_half_angle_deg = 180.0;
    Vec3 cap_axis = Vec3(0, 0, -1);
    std::uint64_t seed = 1;
};

/// Unit-sphere vertices of an icosahedron after `subdivision` rounds of edge splitting
/// (12, 42, 162, … vertices).
std::vector< Vec3 > icosphere_vertices(int subdivision);

/// Camera poses (world_from_camera) looking at `centroid`. Icosphere mode places them at the mid radius;
/// random mode draws direction uniformly over the cap and radius uniformly in range. Throws ConfigError
/// when the radius range is empty or leaves the sensor's depth range.
std::vector< Pose > sample_viewpoints(const ViewpointConfig& config, const Vec3& centroid, const DepthRange& range);

} // namespace slsim

#endif // SLSIM_VIEWPOINTS_HPP
