#ifndef SLSIM_STEREO_MATCHER_HPP
#define SLSIM_STEREO_MATCHER_HPP

#include "slsim/capture_renderer.hpp"
#include "slsim/depth_map.hpp"
#include "slsim/sensor_model.hpp"

#include <cstdint>
#include <optional>

namespace slsim
{

/// Integer intensity raster the matcher operates on.
using LevelImage = Image< std::int32_t >;

/// Sum of absolute differences between the w×w window of `source` whose top-left corner is (x, y) and the
/// window of `target` at (x + u, y + v). Both windows must lie inside their images.
template < typename Derived >
auto sad_cost(const Eigen::ArrayBase< Derived >& source, const Eigen::ArrayBase< Derived >& target, int x, int y, int u,
              int v, int w)
{
    using Scalar = typename Derived::Scalar;
    using Acc = std::conditional_t< std::is_integral_v< Scalar >, std::int64_t, double >;
    Acc sum = 0;
    for (int j = 0; j < w; ++j)
        for (int i = 0; i < w; ++i)
        {
            const Acc a = Acc(source(y + j, x + i));
            const Acc b = Acc(target(y + v + j, x + u + i));
            sum += a > b ? a - b : b - a;
        }
    return sum;
}

/// Inclusive range of integer offsets along the epipolar axis.
struct SearchRange
{
    int lo = 0;
    int hi = 0;
    [[nodiscard]] bool empty() const { return hi < lo; }
};

struct MatchParams
{
    int window = 9;
    int subpixel_denominator = 8;
    double uniqueness_ratio = 0.8;
    int min_texture_levels = 2;
    SubpixelMethod subpixel = SubpixelMethod::parabolic;
    StereoOrientation orientation = StereoOrientation::horizontal;

    static MatchParams from_sensor(const SensorModel& sensor);
};

struct BlockMatch
{
    double disparity = 0; // integer argmin plus snapped subpixel refinement
    std::int64_t cost = 0;
    int offset = 0; // integer argmin
};

/// Sub-pixel shift from the costs either side of the integer minimum, in [-0.5, 0.5] and snapped to
/// 1/denominator steps.
double subpixel_offset(std::int64_t left, std::int64_t center, std::int64_t right, SubpixelMethod method, int denominator);

/// Block match for the pixel centred at (x, y). Offsets whose target window leaves the image are skipped.
/// Returns nothing when the source window leaves the image, no offset is admissible, the window's intensity
/// range is below min_texture_levels, the best offset has non-zero cost and is the last one the image border
/// admits on a side where the search range extends further, or the best cost fails the uniqueness test against the best cost more
/// than one pixel away (rejected when best > ratio · second or best == second).
/// Ties go to the smallest offset. No refinement at the ends of the admissible range or on a zero-cost match.
std::optional< BlockMatch > match_block(const LevelImage& source, const LevelImage& target, int x, int y,
                                        SearchRange search, const MatchParams& params);

/// match_block for every pixel, computed with rolling window sums. When `texture_source` is given the texture
/// test reads its windows instead of `source`'s.
DisparityMap match_images(const LevelImage& source, const LevelImage& target, SearchRange search,
                          const MatchParams& params, const LevelImage* texture_source = nullptr);

/// Local contrast normalization applied to both images before matching: (I − mean) / max(std, 1 level)
/// over the matching window, scaled by 16 and clamped to ±127.
LevelImage normalize_contrast(const LevelImage& levels, int window);

/// Matches a capture against the reference image and reports absolute disparities (relative offset plus
/// the reference plane's disparity), keeping only values inside the sensor's disparity bounds.
DisparityMap compute_disparity(const IrCapture& capture, const ImageF& reference, const SensorModel& sensor);

/// z = f·b / d for valid pixels; non-positive disparities and depths outside the range become invalid.
DepthMap disparity_to_depth(const DisparityMap& disparity, const SensorModel& sensor);

/// Integer offset range that covers the sensor's disparity bounds relative to the reference plane.
SearchRange search_range(const SensorModel& sensor);

} // namespace slsim

#endif // SLSIM_STEREO_MATCHER_HPP
