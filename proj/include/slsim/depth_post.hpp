#ifndef SLSIM_DEPTH_POST_HPP
#define SLSIM_DEPTH_POST_HPP

#include "slsim/depth_map.hpp"
#include "slsim/sensor_model.hpp"

namespace slsim
{

struct PostConfig
{
    int smooth_kernel_px = 3;
    bool fill_holes = true;
    int max_gap_px = 6;
};

/// Invalidates depths outside [z_min, z_max].
DepthMap trim(const DepthMap& depth, const DepthRange& range);
inline DepthMap trim(const DepthMap& depth, const SensorModel& sensor) { return trim(depth, sensor.depth_range); }

/// Median over the valid pixels of a kernel×kernel neighborhood, written only at valid pixels.
/// Throws std::invalid_argument unless the kernel is odd and positive.
DepthMap smooth(const DepthMap& depth, int kernel_px);

/// Fills interior invalid runs along each row that are shorter than max_gap_px by linear interpolation
/// between the bounding valid pixels. Runs touching the image border stay empty.
DepthMap fill_holes(const DepthMap& depth, int max_gap_px);

/// trim → smooth → optional hole filling.
DepthMap post_process(const DepthMap& depth, const SensorModel& sensor, const PostConfig& cfg);

} // namespace slsim

#endif // SLSIM_DEPTH_POST_HPP
