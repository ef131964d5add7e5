#ifndef SLSIM_CONFIG_HPP
#define SLSIM_CONFIG_HPP

#include "slsim/benchmark.hpp"
#include "slsim/viewpoints.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace slsim
{

struct PatternSource
{
    std::filesystem::path file; // 8/16-bit grayscale PNG; empty generates a dot pattern
    int side_px = 1024;
    double density = 0.1;
    std::uint64_t seed = 7;
};

struct ObjectConfig
{
    std::filesystem::path mesh;      // OBJ/PLY/STL; empty uses `primitive`
    std::string primitive = "sphere"; // sphere | box | cylinder
    double size_m = 0.4;
    double unit_scale = 1.0; // mesh units → meters
    Vec3 position = Vec3::Zero();
    Material material;
};

struct BackgroundConfig
{
    /// none | clutter | geometry | real
    std::string mode = "none";
    int clutter_count = 20;
    Aabb clutter_bounds{Vec3(-0.6, -0.6, -0.6), Vec3(0.6, 0.6, 0.6)};
    std::uint64_t clutter_seed = 3;
    /// Geometry mode: a floor plane under the object, moved by this much per frame.
    Vec3 velocity_per_frame = Vec3::Zero();
    std::filesystem::path real_depth_png; // real mode: 16-bit millimeter depth at camera resolution
};

struct SimConfig
{
    SensorModel sensor; // pattern filled in by build_sensor()
    PatternSource pattern;
    NoiseConfig noise;
    PostConfig post;
    MotionSpec motion;
    ObjectConfig object;
    double ambient = 0.02;
    BackgroundConfig background;
    ViewpointConfig viewpoints;
    FlatWallConfig benchmark = FlatWallConfig::defaults();
    std::vector< ErrorModelOverlay > overlays;
    bool write_ir = false;
    std::uint64_t seed = 1;
};

SimConfig default_config();

/// Parses a JSON document; every key is optional and unknown keys are rejected. Relative asset paths
/// resolve against `base_dir`. Throws ConfigError naming the offending key.
SimConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

/// IoError when the file cannot be read.
SimConfig load_config(const std::filesystem::path& path);

/// Complete effective configuration, every default spelled out.
std::string dump_config(const SimConfig& config);

/// 64-bit FNV-1a over the canonical dump; identifies the configuration in dataset manifests.
std::uint64_t config_hash(const SimConfig& config);
std::uint64_t fnv1a64(const std::string& bytes);

/// The configured sensor with its pattern loaded (and padded square) or generated. IoError names a missing file.
SensorModel build_sensor(const SimConfig& config);

} // namespace slsim

#endif // SLSIM_CONFIG_HPP
