#include "slsim/depth_post.hpp"

#include "slsim/parallel.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace slsim
{

DepthMap trim(const DepthMap& depth, const DepthRange& range)
{
    DepthMap out = depth;
    for (Eigen::Index i = 0; i < out.values.size(); ++i)
    {
        if (!out.valid.data()[i])
            continue;
        const double z = out.values.data()[i];
        if (!(z >= range.z_min && z <= range.z_max))
        {
            out.valid.data()[i] = false;
            out.values.data()[i] = std::numeric_limits< double >::quiet_NaN();
        }
    }
    return out;
}

DepthMap smooth(const DepthMap& depth, int kernel_px)
{
    if (kernel_px < 1 || kernel_px % 2 == 0)
        throw std::invalid_argument("smoothing kernel must be odd and positive");
    if (kernel_px == 1)
        return depth;
    const int half = kernel_px / 2;
    const int rows = int(depth.rows()), cols = int(depth.cols());
    DepthMap out = depth;
    parallel_for(0, rows, [&](int y) {
        std::vector< double > window;
        window.reserve(std::size_t(kernel_px) * kernel_px);
        for (int x = 0; x < cols; ++x)
        {
            if (!depth.valid(y, x))
                continue;
            window.clear();
            for (int j = std::max(0, y - half); j <= std::min(rows - 1, y + half); ++j)
                for (int i = std::max(0, x - half); i <= std::min(cols - 1, x + half); ++i)
                    if (depth.valid(j, i))
                        window.push_back(depth.values(j, i));
            // Lower median for even counts keeps the output one of the inputs.
            const auto mid = window.begin() + (window.size() - 1) / 2;
            std::nth_element(window.begin(), mid, window.end());
            out.values(y, x) = *mid;
        }
    });
    return out;
}

DepthMap fill_holes(const DepthMap& depth, int max_gap_px)
{
    DepthMap out = depth;
    if (max_gap_px <= 0)
        return out;
    const int rows = int(depth.rows()), cols = int(depth.cols());
    for (int y = 0; y < rows; ++y)
    {
        int last_valid = -1;
        for (int x = 0; x < cols; ++x)
        {
            if (!depth.valid(y, x))
                continue;
            const int gap = x - last_valid - 1;
            if (last_valid >= 0 && gap > 0 && gap < max_gap_px)
            {
                const double a = depth.values(y, last_valid), b = depth.values(y, x);
                for (int k = 1; k <= gap; ++k)
                    out.set(y, last_valid + k, a + (b - a) * double(k) / double(gap + 1));
            }
            last_valid = x;
        }
    }
    return out;
}

DepthMap post_process(const DepthMap& depth, const SensorModel& sensor, const PostConfig& cfg)
{
    DepthMap out = smooth(trim(depth, sensor), cfg.smooth_kernel_px);
    if (cfg.fill_holes)
        out = fill_holes(out, cfg.max_gap_px);
    return out;
}

} // namespace slsim
