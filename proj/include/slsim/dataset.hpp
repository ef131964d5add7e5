#ifndef SLSIM_DATASET_HPP
#define SLSIM_DATASET_HPP

#include "slsim/config.hpp"
#include "slsim/pipeline.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace slsim
{

struct FrameRecord
{
    int index = 0;
    std::string depth_file;
    std::string ir_file; // empty when IR output is off
    Pose pose = Pose::Identity();
    std::uint64_t seed = 0;
};

struct Manifest
{
    std::uint64_t config_hash = 0;
    std::string config_file;
    int width = 0, height = 0;
    std::vector< FrameRecord > frames; // sorted by index
    double seconds = 0;
    double frames_per_second = 0;
};

struct DatasetOptions
{
    std::filesystem::path out_dir;
    unsigned jobs = 1;
    /// Only the first `max_frames` viewpoints; negative renders all.
    int max_frames = -1;
};

struct DatasetSummary
{
    int frames_total = 0;
    int frames_rendered = 0;
    int frames_resumed = 0;
    double seconds = 0;
    double frames_per_second = 0;
    std::filesystem::path manifest;
};

/// Target object plus geometric background (clutter or floor/wall) described by the config.
/// Mesh loading errors name the file.
Scene build_scene(const SimConfig& config);

/// Background instances moved for frame `frame` when geometry mode has a velocity.
Scene scene_for_frame(const Scene& base, const SimConfig& config, int frame);

/// Viewpoints around the target's bounding-box centre, each passed through canonical_pose.
std::vector< Pose > dataset_viewpoints(const SimConfig& config, const Scene& scene);

/// Rotation rebuilt from its unit quaternion, so a pose stored as quaternion + translation reloads exactly.
Pose canonical_pose(const Pose& pose);

std::string manifest_json(const Manifest& manifest);
/// FormatError on malformed content, IoError when unreadable.
Manifest read_manifest(const std::filesystem::path& path);

/// One depth PNG (post-processed, 16-bit mm) per viewpoint plus optional IR PNG, a copy of the effective
/// config and manifest.json. Frames run on `jobs` workers; the manifest is rewritten by one writer after every
/// frame, so an interrupted run resumes by skipping frames already listed. Logs throughput to `log`.
DatasetSummary generate_dataset(const SimConfig& config, const DatasetOptions& options, std::ostream* log = nullptr);

/// Writes every pipeline stage of one frame: ir.png, ir_noisy.png, disparity.pfm, depth_raw.png, depth_post.png.
std::vector< std::filesystem::path > write_frame_stages(const Frame& frame, int ir_bit_depth,
                                                        const std::filesystem::path& dir);

} // namespace slsim

#endif // SLSIM_DATASET_HPP
