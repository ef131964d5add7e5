#ifndef SLSIM_CAPTURE_RENDERER_HPP
#define SLSIM_CAPTURE_RENDERER_HPP

#include "slsim/image.hpp"
#include "slsim/scene.hpp"
#include "slsim/sensor_model.hpp"

#include <vector>

namespace slsim
{

struct IrCapture
{
    ImageF intensities; // camera resolution, values in [0, 1]
    std::vector< Pose > poses;
    std::vector< double > timestamps;
};

struct MotionSpec
{
    enum class Mode
    {
        static_pose,
        linear_velocity,
        vibration,
        rolling_shutter
    };
    Mode mode = Mode::static_pose;
    Vec3 velocity = Vec3::Zero(); // m/s in the device frame
    double amplitude = 0.0;       // m, vibration only
    int exposures = 1;
    double frame_time = 1.0 / 30.0;

    [[nodiscard]] bool valid() const { return exposures >= 1 && amplitude >= 0 && frame_time > 0; }
};

/// The projector as a light source: pose in the camera frame plus its pinhole model and pattern.
struct ProjectorRig
{
    Pose camera_from_projector = Pose::Identity();
    Intrinsics intrinsics;
    const ImageF* pattern = nullptr;
    double power = 1.0;
    /// Per-axis sub-samples integrating the pattern over a camera pixel; 1 samples the pixel centre only.
    int footprint_samples = 1;

    static ProjectorRig from_sensor(const SensorModel& sensor);
    /// Pattern irradiance reaching world point `p` before shadowing and falloff; 0 outside the frustum.
    [[nodiscard]] double pattern_at(const Vec3& p_projector) const;
};

/// Per-pixel radiance from primary ray hits (Lambert + Schlick/Blinn specular), inverse-square falloff
/// from the projector, projector shadow rays, ambient and extra lights; clamped to [0, 1].
IrCapture render_capture(const AcceleratedScene& accel, const SensorModel& sensor, const Pose& camera_pose,
                         const MotionSpec& motion = {});

/// Static render against an explicit projector rig.
ImageF render_static(const AcceleratedScene& accel, const Intrinsics& camera, const ProjectorRig& projector,
                     const Pose& camera_pose);

/// Motion blur (averaged exposures) or rolling shutter (one row per displaced pose). Requires a non-static mode.
IrCapture render_with_motion(const AcceleratedScene& accel, const SensorModel& sensor, const Pose& camera_pose,
                             const MotionSpec& motion);

/// Device poses of the individual exposures of a blurred capture, in exposure order.
std::vector< Pose > exposure_poses(const Pose& camera_pose, const MotionSpec& motion);

/// Device pose while exposing row `row` of a rolling-shutter capture.
Pose rolling_shutter_pose(const Pose& camera_pose, const MotionSpec& motion, int row, int rows);

} // namespace slsim

#endif // SLSIM_CAPTURE_RENDERER_HPP
