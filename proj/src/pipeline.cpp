#include "slsim/pipeline.hpp"

namespace slsim
{

Pipeline::Pipeline(SensorModel sensor, NoiseConfig noise, PostConfig post)
    : sensor_(std::move(sensor)), noise_(noise), post_(post)
{
    validate(sensor_);
    reference_ = render_reference_image(sensor_);
}

Frame Pipeline::run(const AcceleratedScene& accel, const Pose& camera_pose, const MotionSpec& motion,
                    std::uint64_t noise_seed) const
{
    return reconstruct(render_capture(accel, sensor_, camera_pose, motion), noise_seed);
}

Frame Pipeline::reconstruct(IrCapture ideal, std::uint64_t noise_seed) const
{
    Frame f;
    f.ideal = std::move(ideal);
    NoiseConfig cfg = noise_;
    cfg.seed = noise_seed;
    f.noisy = degrade_capture(f.ideal, cfg, sensor_);
    f.disparity = compute_disparity(f.noisy, reference_, sensor_);
    f.raw_depth = trim(disparity_to_depth(f.disparity, sensor_), sensor_);
    f.post_depth = post_process(f.raw_depth, sensor_, post_);
    return f;
}

} // namespace slsim
