#include "slsim/capture_renderer.hpp"

#include "slsim/error.hpp"
#include "slsim/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace slsim
{

ProjectorRig ProjectorRig::from_sensor(const SensorModel& sensor)
{
    ProjectorRig rig;
    rig.camera_from_projector = sensor.camera_from_projector();
    rig.intrinsics = sensor.projector;
    rig.pattern = &sensor.pattern->image;
    rig.power = sensor.projector_power;
    rig.footprint_samples = sensor.footprint_samples;
    return rig;
}

double ProjectorRig::pattern_at(const Vec3& p) const
{
    if (p.z() <= 0.0 || pattern == nullptr)
        return 0.0;
    const Vec2 uv = intrinsics.project(p);
    const double sx = double(pattern->cols()) / intrinsics.width;
    const double sy = double(pattern->rows()) / intrinsics.height;
    return sample_bilinear(*pattern, (uv.x() + 0.5) * sx - 0.5, (uv.y() + 0.5) * sy - 0.5, 0.0);
}

namespace
{

constexpr double kShadowOffset = 1e-5;

struct Shading
{
    double albedo;
    double rr;
    double exponent;
};

Shading shading_of(const AcceleratedScene& accel, const Hit& hit)
{
    const Material& m = *hit.material;
    double albedo = m.albedo;
    if (m.albedo_map && m.albedo_map->size() > 0)
    {
        const auto& tex = *m.albedo_map;
        const double u = hit.uv.x() - std::floor(hit.uv.x());
        const double v = hit.uv.y() - std::floor(hit.uv.y());
        albedo *= sample_bilinear(tex, u * tex.cols() - 0.5, v * tex.rows() - 0.5, 0.0);
    }
    (void)accel;
    return {albedo, m.reflectance_ratio, std::max(0.0, 2.0 / (m.roughness * m.roughness) - 2.0)};
}

/// Diffuse + specular response for light arriving along `to_light`, seen along `to_eye`.
double brdf_response(const Shading& s, const Vec3& n, const Vec3& to_light, const Vec3& to_eye)
{
    const double cos_l = n.dot(to_light);
    if (cos_l <= 0.0)
        return 0.0;
    if (s.rr <= 0.0)
        return s.albedo * cos_l;
    const Vec3 h = (to_light + to_eye).normalized();
    const double c = std::clamp(to_eye.dot(h), 0.0, 1.0);
    const double fresnel = s.rr + (1.0 - s.rr) * std::pow(1.0 - c, 5.0);
    const double lobe = (s.exponent + 8.0) / 8.0 * std::pow(std::max(0.0, n.dot(h)), s.exponent);
    return ((1.0 - fresnel) * s.albedo + fresnel * lobe) * cos_l;
}

/// Mean pattern value over the pixel footprint, found by intersecting sub-pixel rays with the hit's tangent plane.
double footprint_pattern(const ProjectorRig& rig, const Intrinsics& cam, const Pose& projector_from_world,
                         const Pose& camera_pose, const Hit& hit, int x, int y)
{
    const int n = rig.footprint_samples;
    if (n <= 1)
        return rig.pattern_at(projector_from_world * hit.point);
    const Vec3& normal = hit.geometric_normal;
    const Vec3 eye = camera_pose.translation();
    const double offset = normal.dot(hit.point - eye);
    double sum = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
        {
            const double px = x + (i + 0.5) / n - 0.5, py = y + (j + 0.5) / n - 0.5;
            const Vec3 dir = camera_pose.linear() * Vec3((px - cam.cx) / cam.fx, (py - cam.cy) / cam.fy, 1.0);
            const double denom = normal.dot(dir);
            const double t = denom != 0.0 ? offset / denom : -1.0;
            const Vec3 p = t > 0.0 ? Vec3(eye + t * dir) : hit.point;
            sum += rig.pattern_at(projector_from_world * p);
        }
    return sum / (n * n);
}

void render_row(const AcceleratedScene& accel, const Intrinsics& cam, const ProjectorRig& rig, const Pose& camera_pose,
                int y, double* out)
{
    const Scene& scene = accel.scene();
    const Pose world_from_projector = camera_pose * rig.camera_from_projector;
    const Pose projector_from_world = world_from_projector.inverse();
    const Vec3 projector_origin = world_from_projector.translation();
    const Mat3 rot = camera_pose.linear();
    const Vec3 eye = camera_pose.translation();
    const double no_hit = std::min(1.0, scene.ambient);

    for (int x = 0; x < cam.width; ++x)
    {
        const Ray ray{eye, (rot * cam.ray(x, y)).normalized()};
        const auto hit = accel.intersect(ray);
        if (!hit)
        {
            out[x] = no_hit;
            continue;
        }
        const Shading sh = shading_of(accel, *hit);
        const Vec3 to_eye = -ray.direction;
        const Vec3 lift = hit->point + kShadowOffset * hit->geometric_normal;
        double value = scene.ambient * sh.albedo;

        const double pattern = footprint_pattern(rig, cam, projector_from_world, camera_pose, *hit, x, y);
        if (pattern > 0.0)
        {
            Vec3 to_light = projector_origin - hit->point;
            const double dist = to_light.norm();
            to_light /= dist;
            if (hit->geometric_normal.dot(to_light) > 0.0 &&
                !accel.occluded(Ray{lift, to_light}, dist - 2.0 * kShadowOffset))
                value += rig.power * pattern / (dist * dist) * brdf_response(sh, hit->normal, to_light, to_eye);
        }

        for (const Light& light : scene.lights)
        {
            if (light.intensity <= 0.0)
                continue;
            Vec3 to_light;
            double dist = std::numeric_limits< double >::infinity();
            double irradiance = light.intensity;
            if (light.kind == Light::Kind::point)
            {
                to_light = light.position - hit->point;
                dist = to_light.norm();
                to_light /= dist;
                irradiance /= dist * dist;
            }
            else
                to_light = -light.direction.normalized();
            if (hit->geometric_normal.dot(to_light) <= 0.0 || accel.occluded(Ray{lift, to_light}, dist - 2.0 * kShadowOffset))
                continue;
            value += irradiance * brdf_response(sh, hit->normal, to_light, to_eye);
        }
        out[x] = std::clamp(value, 0.0, 1.0);
    }
}

bool same_pose(const Pose& a, const Pose& b) { return a.matrix() == b.matrix(); }

} // namespace

ImageF render_static(const AcceleratedScene& accel, const Intrinsics& camera, const ProjectorRig& projector,
                     const Pose& camera_pose)
{
    ImageF img(camera.height, camera.width);
    parallel_for(0, camera.height,
                 [&](int y) { render_row(accel, camera, projector, camera_pose, y, img.row(y).data()); });
    return img;
}

std::vector< Pose > exposure_poses(const Pose& camera_pose, const MotionSpec& motion)
{
    std::vector< Pose > poses;
    const int n = std::max(1, motion.exposures);
    const Mat3 rot = camera_pose.linear();
    for (int k = 0; k < n; ++k)
    {
        Pose p = camera_pose;
        if (motion.mode == MotionSpec::Mode::linear_velocity)
            p.translation() += rot * (motion.velocity * (motion.frame_time * k / n));
        else if (motion.mode == MotionSpec::Mode::vibration)
        {
            const Vec3 axis = motion.velocity.norm() > 0 ? Vec3(motion.velocity.normalized()) : Vec3::UnitX();
            p.translation() += rot * (axis * (motion.amplitude * std::sin(2.0 * std::numbers::pi * k / n)));
        }
        poses.push_back(p);
    }
    return poses;
}

Pose rolling_shutter_pose(const Pose& camera_pose, const MotionSpec& motion, int row, int rows)
{
    Pose p = camera_pose;
    p.translation() += camera_pose.linear() * (motion.velocity * (double(row) / rows * motion.frame_time));
    return p;
}

IrCapture render_with_motion(const AcceleratedScene& accel, const SensorModel& sensor, const Pose& camera_pose,
                             const MotionSpec& motion)
{
    if (motion.mode == MotionSpec::Mode::static_pose)
        throw ConfigError("render_with_motion requires a motion mode");
    if (!motion.valid())
        throw ConfigError("motion spec invalid (exposures >= 1, amplitude >= 0, frame_time > 0)");
    const ProjectorRig rig = ProjectorRig::from_sensor(sensor);
    const Intrinsics& cam = sensor.camera;
    IrCapture cap;

    if (motion.mode == MotionSpec::Mode::rolling_shutter)
    {
        cap.intensities.resize(cam.height, cam.width);
        parallel_for(0, cam.height, [&](int y) {
            render_row(accel, cam, rig, rolling_shutter_pose(camera_pose, motion, y, cam.height), y,
                       cap.intensities.row(y).data());
        });
        cap.poses = {camera_pose, rolling_shutter_pose(camera_pose, motion, cam.height - 1, cam.height)};
        cap.timestamps = {0.0, motion.frame_time * (cam.height - 1) / cam.height};
        return cap;
    }

    const auto poses = exposure_poses(camera_pose, motion);
    const int n = int(poses.size());
    for (int k = 0; k < n; ++k)
        cap.timestamps.push_back(motion.frame_time * k / n);
    cap.poses = poses;
    const bool all_same = std::all_of(poses.begin(), poses.end(), [&](const Pose& p) { return same_pose(p, poses[0]); });
    if (all_same)
    {
        cap.intensities = render_static(accel, cam, rig, poses[0]);
        return cap;
    }
    ImageF sum = ImageF::Zero(cam.height, cam.width);
    for (const Pose& p : poses)
        sum += render_static(accel, cam, rig, p);
    cap.intensities = sum / double(n);
    return cap;
}

IrCapture render_capture(const AcceleratedScene& accel, const SensorModel& sensor, const Pose& camera_pose,
                         const MotionSpec& motion)
{
    if (!is_rigid(camera_pose))
        throw ConfigError("camera pose is not a rigid transform");
    if (motion.mode != MotionSpec::Mode::static_pose)
        return render_with_motion(accel, sensor, camera_pose, motion);
    IrCapture cap;
    cap.intensities = render_static(accel, sensor.camera, ProjectorRig::from_sensor(sensor), camera_pose);
    cap.poses = {camera_pose};
    cap.timestamps = {0.0};
    return cap;
}

} // namespace slsim
