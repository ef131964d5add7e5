#ifndef SLSIM_BENCHMARK_HPP
#define SLSIM_BENCHMARK_HPP

#include "slsim/pipeline.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace slsim
{

inline constexpr int kRadialBins = 10;

struct BenchmarkRecord
{
    double distance_m = 0;
    double tilt_deg = 0;
    int seed = 0;
    double valid_fraction = 0;
    double std_error_mm = 0;
    /// NaN where an annulus holds no valid pixel.
    std::array< double, kRadialBins > radial_std_mm{};
};

/// Polynomial standard-error model σ(z) = Σ c_i z^i (mm, z in meters) drawn over the distance panel.
struct ErrorModelOverlay
{
    std::string name;
    std::vector< double > coefficients;
    [[nodiscard]] double operator()(double z_m) const;
};

struct BenchmarkReport
{
    std::vector< BenchmarkRecord > records;
    std::vector< ErrorModelOverlay > overlays;
};

struct FlatWallConfig
{
    std::vector< double > distances_m;
    std::vector< double > tilts_deg;
    int seeds = 5;
    std::uint64_t base_seed = 1;
    Material wall{0.8, 0.0, 0.5, nullptr};
    double ambient = 0.02;
    /// Cells rendered concurrently; 0 uses the global thread count. Kernels inside a cell then run serially.
    unsigned workers = 1;

    /// 1.0–4.0 m in 0.5 m steps, 0–80° in 10° steps, 5 seeds.
    static FlatWallConfig defaults();
};

/// Ground-truth depth (along the optical axis) of a wall at `distance_m` rotated by `tilt_deg` about the
/// camera's vertical axis, per pixel; NaN where the ray misses the plane.
ImageF wall_ground_truth(const Intrinsics& camera, double distance_m, double tilt_deg);

/// Wall scene used by the benchmark: a large quad through (0, 0, distance) tilted about the vertical axis.
Scene make_wall_scene(double distance_m, double tilt_deg, const Material& material, double ambient);

/// Residual statistics of one reconstructed depth map against the analytic plane. valid_fraction counts every
/// pixel at least half a window from the image edge.
BenchmarkRecord evaluate_wall(const DepthMap& depth, const ImageF& ground_truth, const SensorModel& sensor);

/// Renders each (distance, tilt) wall once and reconstructs it under `seeds` noise seeds. Validates the whole
/// grid first and throws ConfigError before any rendering when a distance or tilt is out of range.
BenchmarkReport run_flat_wall(const Pipeline& pipeline, const FlatWallConfig& config);

/// CSV `distance_m,tilt_deg,seed,valid_fraction,std_error_mm,bin0..bin9` plus three SVG panels
/// (error vs distance, vs tilt, vs radial distance). Returns the written paths; IoError names the failing path.
std::vector< std::filesystem::path > export_report(const BenchmarkReport& report, const std::filesystem::path& out_dir,
                                                   const Intrinsics& camera);

std::string report_csv(const BenchmarkReport& report);

} // namespace slsim

#endif // SLSIM_BENCHMARK_HPP
