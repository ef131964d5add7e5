#ifndef SLSIM_PIPELINE_HPP
#define SLSIM_PIPELINE_HPP

#include "slsim/capture_noise.hpp"
#include "slsim/capture_renderer.hpp"
#include "slsim/depth_post.hpp"
#include "slsim/scene.hpp"
#include "slsim/sensor_model.hpp"
#include "slsim/stereo_matcher.hpp"

#include <cstdint>

namespace slsim
{

/// Every intermediate stage of one simulated scan.
struct Frame
{
    IrCapture ideal;
    IrCapture noisy;
    DisparityMap disparity;
    DepthMap raw_depth;  // straight from the matcher, trimmed to range
    DepthMap post_depth; // after smoothing / hole filling
};

/// Sensor + noise + post-processing with the reference image computed once at construction.
class Pipeline
{
  public:
    Pipeline(SensorModel sensor, NoiseConfig noise, PostConfig post);

    [[nodiscard]] Frame run(const AcceleratedScene& accel, const Pose& camera_pose, const MotionSpec& motion,
                            std::uint64_t noise_seed) const;
    /// Noise → matching → depth → post-processing for an already rendered capture.
    [[nodiscard]] Frame reconstruct(IrCapture ideal, std::uint64_t noise_seed) const;

    [[nodiscard]] const SensorModel& sensor() const { return sensor_; }
    [[nodiscard]] const NoiseConfig& noise() const { return noise_; }
    [[nodiscard]] const PostConfig& post() const { return post_; }
    [[nodiscard]] const ImageF& reference() const { return reference_; }

  private:
    SensorModel sensor_;
    NoiseConfig noise_;
    PostConfig post_;
    ImageF reference_;
};

} // namespace slsim

#endif // SLSIM_PIPELINE_HPP
