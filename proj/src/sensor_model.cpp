#include "slsim/sensor_model.hpp"

#include "slsim/error.hpp"
#include "slsim/parallel.hpp"
#include "slsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace slsim
{

Intrinsics Intrinsics::scaled(double factor) const
{
    Intrinsics out = *this;
    out.fx = fx * factor;
    out.fy = fy * factor;
    // Pixel centers sit at integers, so the continuous image edge is at -0.5.
    out.cx = (cx + 0.5) * factor - 0.5;
    out.cy = (cy + 0.5) * factor - 0.5;
    out.width = int(std::lround(width * factor));
    out.height = int(std::lround(height * factor));
    return out;
}

SensorModel SensorModel::kinect_like(std::uint64_t pattern_seed)
{
    SensorModel s;
    s.pattern = std::make_shared< const Pattern >(generate_dot_pattern(1024, 0.1, pattern_seed, s.window_size_px));
    return s;
}

double SensorModel::reference_disparity() const
{
    const double den = subpixel_denominator;
    const double z = reference_depth_m > 0.0 ? reference_depth_m : 2.0 * depth_range.z_min;
    return std::round(fb() / z * den) / den;
}

Pose SensorModel::camera_from_projector() const
{
    Pose pose = Pose::Identity();
    if (orientation == StereoOrientation::horizontal)
        pose.translation() = Vec3(-baseline_m, 0, 0);
    else
        pose.translation() = Vec3(0, -baseline_m, 0);
    return pose;
}

void validate(const SensorModel& s)
{
    if (!s.camera.valid())
        throw ConfigError("camera intrinsics invalid (need fx,fy > 0 and principal point inside the image)");
    if (!s.projector.valid())
        throw ConfigError("projector intrinsics invalid");
    if (!(s.baseline_m > 0))
        throw ConfigError("baseline must be positive");
    if (!(s.depth_range.z_min > 0 && s.depth_range.z_min < s.depth_range.z_max))
        throw ConfigError("depth range must satisfy 0 < z_min < z_max");
    if (s.window_size_px < 3 || s.window_size_px % 2 == 0)
        throw ConfigError("window size must be odd and at least 3");
    if (s.subpixel_denominator < 1)
        throw ConfigError("subpixel denominator must be at least 1");
    if (s.footprint_samples < 1 || s.footprint_samples > 16)
        throw ConfigError("footprint samples must be in [1, 16]");
    if (s.ir_bit_depth < 1 || s.ir_bit_depth > 16)
        throw ConfigError("IR bit depth must be in [1, 16]");
    if (!s.pattern || s.pattern->image.size() == 0 || s.pattern->image.rows() != s.pattern->image.cols())
        throw ConfigError("sensor pattern must be a non-empty square image");
    if (s.pattern->image.minCoeff() < 0.0 || s.pattern->image.maxCoeff() > 1.0)
        throw ConfigError("pattern intensities must lie in [0, 1]");
    if (!(s.uniqueness_ratio > 0 && s.uniqueness_ratio <= 1))
        throw ConfigError("uniqueness ratio must be in (0, 1]");
    if (!(s.projector_power >= 0))
        throw ConfigError("projector power must be non-negative");
}

Pattern pad_pattern_square(const ImageF& raw)
{
    const Eigen::Index side = std::max(raw.rows(), raw.cols());
    Pattern p;
    p.image = ImageF::Zero(side, side);
    const Eigen::Index top = (side - raw.rows()) / 2;
    const Eigen::Index left = (side - raw.cols()) / 2;
    p.image.block(top, left, raw.rows(), raw.cols()) = raw;
    return p;
}

namespace
{

// 128-bit signature of a window (up to 11×11) at (x, y).
struct BlockKey
{
    std::uint64_t lo = 0, hi = 0;
    bool operator==(const BlockKey&) const = default;
};

struct BlockKeyHash
{
    std::size_t operator()(const BlockKey& k) const { return std::hash< std::uint64_t >()(k.lo * 0x9e3779b97f4a7c15ull ^ k.hi); }
};

BlockKey block_key(const Image< std::uint8_t >& bits, int x, int y, int w)
{
    BlockKey key;
    int n = 0;
    for (int j = 0; j < w; ++j)
        for (int i = 0; i < w; ++i, ++n)
            if (bits(y + j, x + i))
            {
                if (n < 64)
                    key.lo |= 1ull << n;
                else
                    key.hi |= 1ull << (n - 64);
            }
    return key;
}

} // namespace

Pattern generate_dot_pattern(int side_px, double dot_density, std::uint64_t seed, int window_size)
{
    const int n = side_px * side_px;
    Rng rng(seed);
    std::vector< int > cells(n);
    std::iota(cells.begin(), cells.end(), 0);
    const int dots = int(std::lround(dot_density * n));
    // Partial Fisher–Yates: the first `dots` entries become lit.
    for (int i = 0; i < dots; ++i)
        std::swap(cells[i], cells[i + int(rng.index(std::uint64_t(n - i)))]);
    Image< std::uint8_t > bits = Image< std::uint8_t >::Zero(side_px, side_px);
    for (int i = 0; i < dots; ++i)
        bits(cells[i] / side_px, cells[i] % side_px) = 1;

    const int w = std::min(window_size, 11);
    if (side_px >= w)
    {
        for (int pass = 0; pass < 4; ++pass)
        {
            bool repaired = false;
            for (int y = 0; y + w <= side_px; ++y)
            {
                std::unordered_set< BlockKey, BlockKeyHash > seen;
                seen.reserve(std::size_t(side_px));
                for (int x = 0; x + w <= side_px; ++x)
                {
                    const BlockKey key = block_key(bits, x, y, w);
                    if ((key.lo == 0 && key.hi == 0) || !seen.insert(key).second)
                    {
                        bits(y + int(rng.index(w)), x + int(rng.index(w))) = 1;
                        repaired = true;
                    }
                }
            }
            if (!repaired)
                break;
        }
    }
    Pattern p;
    p.image = bits.cast< double >();
    return p;
}

ImageF render_reference_image(const SensorModel& sensor)
{
    const Intrinsics& cam = sensor.camera;
    const Intrinsics& proj = sensor.projector;
    const Pose projector_from_camera = sensor.camera_from_projector().inverse();
    const double z_ref = sensor.reference_depth();
    const ImageF& pattern = sensor.pattern->image;
    // Projector pixel grid → pattern raster when the two differ in size.
    const double sx = double(pattern.cols()) / proj.width;
    const double sy = double(pattern.rows()) / proj.height;
    const int n = sensor.footprint_samples;

    ImageF out(cam.height, cam.width);
    parallel_for(0, cam.height, [&](int y) {
        for (int x = 0; x < cam.width; ++x)
        {
            double sum = 0.0;
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                {
                    const double px = x + (i + 0.5) / n - 0.5, py = y + (j + 0.5) / n - 0.5;
                    const Vec3 p_cam((px - cam.cx) / cam.fx * z_ref, (py - cam.cy) / cam.fy * z_ref, z_ref);
                    const Vec2 uv = proj.project(projector_from_camera * p_cam);
                    sum += sample_bilinear(pattern, (uv.x() + 0.5) * sx - 0.5, (uv.y() + 0.5) * sy - 0.5, 0.0);
                }
            out(y, x) = sum / (n * n);
        }
    });
    return out;
}

} // namespace slsim
