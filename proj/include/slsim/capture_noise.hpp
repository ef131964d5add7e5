#ifndef SLSIM_CAPTURE_NOISE_HPP
#define SLSIM_CAPTURE_NOISE_HPP

#include "slsim/capture_renderer.hpp"
#include "slsim/sensor_model.hpp"

#include <cstdint>

namespace slsim
{

struct NoiseConfig
{
    bool lens_distortion = true; // uses the camera intrinsics' coefficients
    double gaussian_sigma = 0.002;
    double grain_sigma = 0.01;
    int scratch_count = 0;
    double scratch_strength = 0.3;
    std::uint64_t seed = 0;

    [[nodiscard]] bool valid() const { return gaussian_sigma >= 0 && grain_sigma >= 0 && scratch_count >= 0; }
    /// Everything off; only quantization remains.
    static NoiseConfig none()
    {
        NoiseConfig c;
        c.lens_distortion = false;
        c.gaussian_sigma = 0;
        c.grain_sigma = 0;
        c.scratch_count = 0;
        return c;
    }
};

/// Output pixel p reads the input at K·distort(K⁻¹·p), bilinearly; samples falling outside read 0.
IrCapture apply_lens_distortion(const IrCapture& capture, const Intrinsics& intr);

/// Grain (multiplicative), scratches, i.i.d. Gaussian noise, clamp to [0, 1], then quantization to
/// `bit_depth` levels. Values stay in [0, 1] as level / (2^bit_depth − 1).
IrCapture apply_sensor_noise(const IrCapture& capture, const NoiseConfig& cfg, int bit_depth);

/// Full imaging-sensor chain: distortion (when enabled) then apply_sensor_noise.
IrCapture degrade_capture(const IrCapture& capture, const NoiseConfig& cfg, const SensorModel& sensor);

} // namespace slsim

#endif // SLSIM_CAPTURE_NOISE_HPP
