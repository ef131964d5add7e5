#include "slsim/capture_noise.hpp"

#include "slsim/error.hpp"
#include "slsim/parallel.hpp"
#include "slsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace slsim
{

IrCapture apply_lens_distortion(const IrCapture& capture, const Intrinsics& intr)
{
    if (!intr.distortion.finite())
        throw ConfigError("distortion coefficients must be finite");
    if (intr.distortion.is_zero())
        return capture;
    IrCapture out = capture;
    const ImageF& src = capture.intensities;
    parallel_for(0, int(src.rows()), [&](int y) {
        for (int x = 0; x < src.cols(); ++x)
        {
            const Vec2 s = intr.distort_pixel(Vec2(x, y));
            out.intensities(y, x) = sample_bilinear(src, s.x(), s.y(), 0.0);
        }
    });
    return out;
}

namespace
{

// Streams per noise component so toggling one leaves the others' fields unchanged.
enum Stream : std::uint64_t
{
    kGrain = 1,
    kScratch = 2,
    kGaussian = 3
};

void add_scratches(ImageF& img, int count, double strength, Rng& rng)
{
    const double w = double(img.cols()), h = double(img.rows());
    for (int s = 0; s < count; ++s)
    {
        const Vec2 a(rng.uniform(0, w), rng.uniform(0, h));
        const double angle = rng.uniform(0, std::numbers::pi);
        const double length = rng.uniform(0.1, 0.5) * std::min(w, h);
        const Vec2 dir(std::cos(angle), std::sin(angle));
        const Vec2 b = a + length * dir;
        const double width = rng.uniform(1.0, 2.0); // profile FWHM in pixels
        const double sigma = width / 2.3548;
        const int x0 = std::max(0, int(std::floor(std::min(a.x(), b.x()) - 3 * width)));
        const int x1 = std::min(int(w) - 1, int(std::ceil(std::max(a.x(), b.x()) + 3 * width)));
        const int y0 = std::max(0, int(std::floor(std::min(a.y(), b.y()) - 3 * width)));
        const int y1 = std::min(int(h) - 1, int(std::ceil(std::max(a.y(), b.y()) + 3 * width)));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x)
            {
                const Vec2 p(x, y);
                const double t = std::clamp((p - a).dot(dir), 0.0, length);
                const double d = (p - (a + t * dir)).norm();
                img(y, x) += strength * std::exp(-0.5 * d * d / (sigma * sigma));
            }
    }
}

} // namespace

IrCapture apply_sensor_noise(const IrCapture& capture, const NoiseConfig& cfg, int bit_depth)
{
    if (!cfg.valid())
        throw ConfigError("noise sigmas and scratch count must be non-negative");
    IrCapture out = capture;
    ImageF& img = out.intensities;

    if (cfg.grain_sigma > 0)
    {
        Rng rng(Rng::derive(cfg.seed, kGrain));
        for (Eigen::Index i = 0; i < img.size(); ++i)
            img.data()[i] *= 1.0 + cfg.grain_sigma * rng.normal();
    }
    if (cfg.scratch_count > 0)
    {
        Rng rng(Rng::derive(cfg.seed, kScratch));
        add_scratches(img, cfg.scratch_count, cfg.scratch_strength, rng);
    }
    if (cfg.gaussian_sigma > 0)
    {
        Rng rng(Rng::derive(cfg.seed, kGaussian));
        for (Eigen::Index i = 0; i < img.size(); ++i)
            img.data()[i] += cfg.gaussian_sigma * rng.normal();
    }
    img = from_levels(to_levels(img, bit_depth), bit_depth);
    return out;
}

IrCapture degrade_capture(const IrCapture& capture, const NoiseConfig& cfg, const SensorModel& sensor)
{
    const IrCapture warped = cfg.lens_distortion ? apply_lens_distortion(capture, sensor.camera) : capture;
    return apply_sensor_noise(warped, cfg, sensor.ir_bit_depth);
}

} // namespace slsim
