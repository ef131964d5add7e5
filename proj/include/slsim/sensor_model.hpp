#ifndef SLSIM_SENSOR_MODEL_HPP
#define SLSIM_SENSOR_MODEL_HPP

#include "slsim/geometry.hpp"
#include "slsim/image.hpp"

#include <cstdint>
#include <memory>

namespace slsim
{

/// Brown–Conrady coefficients acting on normalized image coordinates.
struct Distortion
{
    double k1 = 0, k2 = 0, k3 = 0;
    double p1 = 0, p2 = 0;

    [[nodiscard]] bool is_zero() const { return k1 == 0 && k2 == 0 && k3 == 0 && p1 == 0 && p2 == 0; }
    [[nodiscard]] bool finite() const
    {
        return std::isfinite(k1) && std::isfinite(k2) && std::isfinite(k3) && std::isfinite(p1) && std::isfinite(p2);
    }
    /// Forward model: ideal normalized coordinates → distorted normalized coordinates.
    [[nodiscard]] Vec2 distort(const Vec2& xn) const
    {
        const double x = xn.x(), y = xn.y();
        const double r2 = x * x + y * y;
        const double radial = 1.0 + r2 * (k1 + r2 * (k2 + r2 * k3));
        return {x * radial + 2.0 * p1 * x * y + p2 * (r2 + 2.0 * x * x),
                y * radial + p1 * (r2 + 2.0 * y * y) + 2.0 * p2 * x * y};
    }
    /// Fixed-point inversion of distort().
    [[nodiscard]] Vec2 undistort(const Vec2& xd, int iterations = 50) const
    {
        Vec2 x = xd;
        for (int i = 0; i < iterations; ++i)
            x += xd - distort(x);
        return x;
    }
};

struct Intrinsics
{
    double fx = 580, fy = 580;
    double cx = 319.5, cy = 239.5;
    int width = 640, height = 480;
    Distortion distortion;

    [[nodiscard]] bool valid() const
    {
        return fx > 0 && fy > 0 && cx >= 0 && cx < width && cy >= 0 && cy < height && width > 0 && height > 0 &&
               distortion.finite();
    }
    /// Pinhole projection of a point in this device's frame; distortion is not applied.
    [[nodiscard]] Vec2 project(const Vec3& p) const { return {fx * p.x() / p.z() + cx, fy * p.y() / p.z() + cy}; }
    /// Unit ray direction through a pixel position (pinhole).
    [[nodiscard]] Vec3 ray(double px, double py) const
    {
        return Vec3((px - cx) / fx, (py - cy) / fy, 1.0).normalized();
    }
    [[nodiscard]] Vec2 normalize(const Vec2& px) const { return {(px.x() - cx) / fx, (px.y() - cy) / fy}; }
    [[nodiscard]] Vec2 denormalize(const Vec2& xn) const { return {fx * xn.x() + cx, fy * xn.y() + cy}; }
    [[nodiscard]] Vec2 distort_pixel(const Vec2& px) const { return denormalize(distortion.distort(normalize(px))); }
    [[nodiscard]] Vec2 undistort_pixel(const Vec2& px) const { return denormalize(distortion.undistort(normalize(px))); }
    /// Same field of view at a different raster size.
    [[nodiscard]] Intrinsics scaled(double factor) const;
};

/// Square projector image with intensities in [0, 1].
struct Pattern
{
    ImageF image;
    [[nodiscard]] int side() const { return int(image.rows()); }
};

enum class StereoOrientation
{
    horizontal,
    vertical
};

enum class SubpixelMethod
{
    parabolic,
    equiangular
};

struct DepthRange
{
    double z_min = 0.4;
    double z_max = 8.0;
};

struct SensorModel
{
    /// Mild barrel distortion of an uncalibrated IR lens; applied by the capture noise stage.
    Intrinsics camera{580, 580, 319.5, 239.5, 640, 480, {-0.008, 0, 0, 0, 0}};
    Intrinsics projector{580, 580, 511.5, 511.5, 1024, 1024, {}};
    double baseline_m = 0.075;
    StereoOrientation orientation = StereoOrientation::horizontal;
    std::shared_ptr< const Pattern > pattern;
    DepthRange depth_range;
    int window_size_px = 9;
    int subpixel_denominator = 8;
    int ir_bit_depth = 10;
    /// Sub-samples per axis used to integrate the pattern over each camera pixel's footprint.
    int footprint_samples = 4;

    /// Irradiance scale of a fully lit pattern pixel at 1 m on a surface facing the projector.
    double projector_power = 0.8;
    /// Matching validity tests.
    double uniqueness_ratio = 0.8;
    int min_texture_levels = 2;
    /// Left-right consistency tolerance in pixels between forward and reverse matches; <= 0 disables the check.
    double consistency_px = 1.0;
    SubpixelMethod subpixel_method = SubpixelMethod::parabolic;
    /// Reference plane depth; <= 0 selects 2 z_min. Either way the plane is moved so its disparity is representable.
    double reference_depth_m = 0.0;

    /// Kinect-class preset with a generated 1024 px dot pattern.
    static SensorModel kinect_like(std::uint64_t pattern_seed = 7);

    [[nodiscard]] double focal_px() const
    {
        return orientation == StereoOrientation::horizontal ? camera.fx : camera.fy;
    }
    /// f·b in pixel-meters; depth = fb / disparity.
    [[nodiscard]] double fb() const { return focal_px() * baseline_m; }
    [[nodiscard]] double disparity_min() const { return fb() / depth_range.z_max; }
    [[nodiscard]] double disparity_max() const { return fb() / depth_range.z_min; }
    [[nodiscard]] double reference_depth() const { return fb() / reference_disparity(); }
    [[nodiscard]] double reference_disparity() const;
    /// Projector pose in the camera frame: displaced by the baseline along -x (horizontal) or -y (vertical).
    [[nodiscard]] Pose camera_from_projector() const;
};

/// Throws ConfigError naming the first violated invariant.
void validate(const SensorModel& sensor);

/// Centers `raw` in a zero-padded square of side max(width, height).
Pattern pad_pattern_square(const ImageF& raw);

/// Deterministic pseudo-random binary dot pattern. Exactly round(density · side²) dots are placed, then
/// blank or repeated window-sized blocks within each horizontal strip are repaired by adding dots.
Pattern generate_dot_pattern(int side_px, double dot_density, std::uint64_t seed, int window_size = 9);

/// The pattern as the camera would see it on a fronto-parallel plane at the reference depth, without
/// radiometric falloff. Deterministic; computed once per sensor configuration by callers.
ImageF render_reference_image(const SensorModel& sensor);

/// Depth for a disparity; the single formula every module uses so depth values stay bit-identical.
inline double depth_from_disparity(double fb, double disparity) { return fb / disparity; }

} // namespace slsim

#endif // SLSIM_SENSOR_MODEL_HPP
