#include "slsim/stereo_matcher.hpp"

#include "slsim/error.hpp"
#include "slsim/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace slsim
{

MatchParams MatchParams::from_sensor(const SensorModel& sensor)
{
    MatchParams p;
    p.window = sensor.window_size_px;
    p.subpixel_denominator = sensor.subpixel_denominator;
    p.uniqueness_ratio = sensor.uniqueness_ratio;
    p.min_texture_levels = sensor.min_texture_levels;
    p.subpixel = sensor.subpixel_method;
    p.orientation = sensor.orientation;
    return p;
}

double subpixel_offset(std::int64_t left, std::int64_t center, std::int64_t right, SubpixelMethod method, int denominator)
{
    double delta = 0.0;
    if (method == SubpixelMethod::parabolic)
    {
        const double curvature = double(left) - 2.0 * double(center) + double(right);
        if (curvature > 0.0)
            delta = (double(left) - double(right)) / (2.0 * curvature);
    }
    else
    {
        const double slope = double(std::max(left - center, right - center));
        if (slope > 0.0)
            delta = (double(left) - double(right)) / (2.0 * slope);
    }
    delta = std::clamp(delta, -0.5, 0.5);
    double snapped = std::round(delta * denominator) / denominator;
    // Coarse grids can round ±0.5 outward; step back so the shift never exceeds half a pixel.
    if (std::abs(snapped) > 0.5)
        snapped -= std::copysign(1.0 / denominator, snapped);
    return snapped;
}

namespace
{

/// Picks the winner among costs[k] for k in [klo, khi] out of K search offsets; offsets are lo + k.
template < typename Cost >
std::optional< BlockMatch > resolve(const Cost* costs, int klo, int khi, int K, int lo, const MatchParams& params)
{
    int best = klo;
    for (int k = klo + 1; k <= khi; ++k)
        if (costs[k] < costs[best])
            best = k;
    // The image border cut the search short on the winning side, so a lower cost may lie beyond it.
    if (costs[best] > 0 && ((best == klo && klo > 0) || (best == khi && khi < K - 1)))
        return std::nullopt;
    std::int64_t second = std::numeric_limits< std::int64_t >::max();
    for (int k = klo; k <= khi; ++k)
        if ((k < best - 1 || k > best + 1) && std::int64_t(costs[k]) < second)
            second = costs[k];
    const std::int64_t c0 = costs[best];
    if (second != std::numeric_limits< std::int64_t >::max() &&
        (double(c0) > params.uniqueness_ratio * double(second) || c0 == second))
        return std::nullopt;

    BlockMatch m;
    m.offset = lo + best;
    m.cost = c0;
    m.disparity = m.offset;
    // A zero cost is already the global minimum of a non-negative cost curve.
    if (best > klo && best < khi && c0 > 0)
        m.disparity += subpixel_offset(costs[best - 1], c0, costs[best + 1], params.subpixel, params.subpixel_denominator);
    return m;
}

bool has_texture(const LevelImage& img, int x, int y, int half, int min_levels)
{
    std::int32_t lo = std::numeric_limits< std::int32_t >::max();
    std::int32_t hi = std::numeric_limits< std::int32_t >::min();
    for (int j = -half; j <= half; ++j)
        for (int i = -half; i <= half; ++i)
        {
            const std::int32_t v = img(y + j, x + i);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    return std::int64_t(hi) - lo >= min_levels;
}

Mask texture_mask(const LevelImage& img, int half, int min_levels)
{
    const int rows = int(img.rows()), cols = int(img.cols());
    Mask ok = Mask::Constant(rows, cols, false);
    if (rows < 2 * half + 1 || cols < 2 * half + 1)
        return ok;
    // Separable running min/max: horizontal pass then vertical.
    LevelImage hmin(rows, cols), hmax(rows, cols);
    for (int y = 0; y < rows; ++y)
        for (int x = half; x < cols - half; ++x)
        {
            auto seg = img.row(y).segment(x - half, 2 * half + 1);
            hmin(y, x) = seg.minCoeff();
            hmax(y, x) = seg.maxCoeff();
        }
    for (int y = half; y < rows - half; ++y)
        for (int x = half; x < cols - half; ++x)
        {
            const auto lo = hmin.col(x).segment(y - half, 2 * half + 1).minCoeff();
            const auto hi = hmax.col(x).segment(y - half, 2 * half + 1).maxCoeff();
            ok(y, x) = std::int64_t(hi) - lo >= min_levels;
        }
    return ok;
}

DisparityMap match_horizontal(const LevelImage& source, const LevelImage& target, SearchRange search,
                              const MatchParams& params, const LevelImage& texture_source)
{
    const int rows = int(source.rows()), cols = int(source.cols());
    const int half = params.window / 2;
    DisparityMap out(rows, cols);
    if (search.empty() || rows < params.window || cols < params.window)
        return out;

    const Mask textured = texture_mask(texture_source, half, params.min_texture_levels);
    const int lo = search.lo;
    const int K = search.hi - search.lo + 1;
    constexpr int kBand = 16;
    const int first_row = half, last_row = rows - 1 - half;
    const int bands = (last_row - first_row) / kBand + 1;

    parallel_for(0, bands, [&](int band) {
        const int y_begin = first_row + band * kBand;
        const int y_end = std::min(last_row, y_begin + kBand - 1);
        std::vector< std::int32_t > colsum(std::size_t(K) * cols, 0);
        std::vector< std::int32_t > cost(std::size_t(cols) * K, 0);

        auto accumulate_row = [&](int yy, int sign) {
            const std::int32_t* s = source.row(yy).data();
            const std::int32_t* t = target.row(yy).data();
            for (int k = 0; k < K; ++k)
            {
                const int u = lo + k;
                const int x0 = std::max(0, -u), x1 = std::min(cols - 1, cols - 1 - u);
                std::int32_t* cs = colsum.data() + std::size_t(k) * cols;
                for (int x = x0; x <= x1; ++x)
                {
                    const std::int32_t d = s[x] - t[x + u];
                    cs[x] += sign * (d < 0 ? -d : d);
                }
            }
        };

        for (int j = y_begin - half; j <= y_begin + half; ++j)
            accumulate_row(j, +1);

        for (int y = y_begin; y <= y_end; ++y)
        {
            if (y != y_begin)
            {
                accumulate_row(y + half, +1);
                accumulate_row(y - half - 1, -1);
            }
            for (int k = 0; k < K; ++k)
            {
                const int u = lo + k;
                const int x_lo = std::max(half, half - u);
                const int x_hi = std::min(cols - 1 - half, cols - 1 - half - u);
                if (x_lo > x_hi)
                    continue;
                const std::int32_t* cs = colsum.data() + std::size_t(k) * cols;
                std::int32_t s = 0;
                for (int i = -half; i <= half; ++i)
                    s += cs[x_lo + i];
                cost[std::size_t(x_lo) * K + k] = s;
                for (int x = x_lo + 1; x <= x_hi; ++x)
                {
                    s += cs[x + half] - cs[x - half - 1];
                    cost[std::size_t(x) * K + k] = s;
                }
            }
            for (int x = half; x <= cols - 1 - half; ++x)
            {
                if (!textured(y, x))
                    continue;
                const int klo = std::max(0, half - x - lo);
                const int khi = std::min(K - 1, cols - 1 - half - x - lo);
                if (klo > khi)
                    continue;
                if (const auto m = resolve(cost.data() + std::size_t(x) * K, klo, khi, K, lo, params))
                    out.set(y, x, m->disparity);
            }
        }
    });
    return out;
}

} // namespace

std::optional< BlockMatch > match_block(const LevelImage& source, const LevelImage& target, int x, int y,
                                        SearchRange search, const MatchParams& params)
{
    const int half = params.window / 2;
    const int rows = int(source.rows()), cols = int(source.cols());
    if (x - half < 0 || y - half < 0 || x + half >= cols || y + half >= rows || search.empty())
        return std::nullopt;
    if (!has_texture(source, x, y, half, params.min_texture_levels))
        return std::nullopt;

    const bool horizontal = params.orientation == StereoOrientation::horizontal;
    const int along = horizontal ? x : y;
    const int extent = horizontal ? int(target.cols()) : int(target.rows());
    const int other_ok = horizontal ? (y + half < target.rows()) : (x + half < target.cols());
    if (!other_ok)
        return std::nullopt;
    const int K = search.hi - search.lo + 1;
    const int klo = std::max(0, half - along - search.lo);
    const int khi = std::min(K - 1, extent - 1 - half - along - search.lo);
    if (klo > khi)
        return std::nullopt;

    std::vector< std::int64_t > costs(K, 0);
    for (int k = klo; k <= khi; ++k)
    {
        const int off = search.lo + k;
        costs[k] = horizontal ? sad_cost(source, target, x - half, y - half, off, 0, params.window)
                              : sad_cost(source, target, x - half, y - half, 0, off, params.window);
    }
    return resolve(costs.data(), klo, khi, K, search.lo, params);
}

DisparityMap match_images(const LevelImage& source, const LevelImage& target, SearchRange search,
                          const MatchParams& params, const LevelImage* texture_source)
{
    if (source.rows() != target.rows() || source.cols() != target.cols())
        throw DimensionError("match_images: source and target sizes differ");
    const LevelImage& tex = texture_source ? *texture_source : source;
    if (tex.rows() != source.rows() || tex.cols() != source.cols())
        throw DimensionError("match_images: texture source size differs");
    if (params.orientation == StereoOrientation::horizontal)
        return match_horizontal(source, target, search, params, tex);

    const LevelImage st = source.transpose(), tt = target.transpose(), xt = tex.transpose();
    const DisparityMap d = match_horizontal(st, tt, search, params, xt);
    DisparityMap out;
    out.values = d.values.transpose();
    out.valid = d.valid.transpose();
    return out;
}

LevelImage normalize_contrast(const LevelImage& levels, int window)
{
    const int rows = int(levels.rows()), cols = int(levels.cols());
    const int half = window / 2;
    // Summed-area tables of I and I²; windows are clipped at the border.
    Eigen::Array< double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor > s1 =
        Eigen::Array< double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor >::Zero(rows + 1, cols + 1);
    auto s2 = s1;
    for (int y = 0; y < rows; ++y)
        for (int x = 0; x < cols; ++x)
        {
            const double v = levels(y, x);
            s1(y + 1, x + 1) = v + s1(y, x + 1) + s1(y + 1, x) - s1(y, x);
            s2(y + 1, x + 1) = v * v + s2(y, x + 1) + s2(y + 1, x) - s2(y, x);
        }
    LevelImage out(rows, cols);
    parallel_for(0, rows, [&](int y) {
        const int y0 = std::max(0, y - half), y1 = std::min(rows, y + half + 1);
        for (int x = 0; x < cols; ++x)
        {
            const int x0 = std::max(0, x - half), x1 = std::min(cols, x + half + 1);
            const double n = double(y1 - y0) * (x1 - x0);
            const double sum = s1(y1, x1) - s1(y0, x1) - s1(y1, x0) + s1(y0, x0);
            const double sq = s2(y1, x1) - s2(y0, x1) - s2(y1, x0) + s2(y0, x0);
            const double mean = sum / n;
            const double sd = std::sqrt(std::max(0.0, sq / n - mean * mean));
            const double z = 16.0 * (levels(y, x) - mean) / std::max(sd, 1.0);
            out(y, x) = std::int32_t(std::clamp(std::lround(z), -127l, 127l));
        }
    });
    return out;
}

SearchRange search_range(const SensorModel& sensor)
{
    const double d_ref = sensor.reference_disparity();
    return {int(std::floor(sensor.disparity_min() - d_ref)), int(std::ceil(sensor.disparity_max() - d_ref))};
}

DisparityMap compute_disparity(const IrCapture& capture, const ImageF& reference, const SensorModel& sensor)
{
    const ImageF& img = capture.intensities;
    if (img.rows() != reference.rows() || img.cols() != reference.cols())
        throw DimensionError("capture and reference resolutions differ");
    if (img.rows() != sensor.camera.height || img.cols() != sensor.camera.width)
        throw DimensionError("capture resolution differs from the camera's");

    const LevelImage raw = to_levels(img, sensor.ir_bit_depth).cast< std::int32_t >();
    const LevelImage ref = to_levels(reference, sensor.ir_bit_depth).cast< std::int32_t >();
    const MatchParams params = MatchParams::from_sensor(sensor);
    const LevelImage src = normalize_contrast(raw, params.window);
    const LevelImage tgt = normalize_contrast(ref, params.window);
    const SearchRange search = search_range(sensor);
    DisparityMap rel = match_images(src, tgt, search, params, &raw);
    if (sensor.consistency_px > 0.0)
    {
        // Match the reference back onto the capture; a forward match must be claimed by its target.
        const DisparityMap back = match_images(tgt, src, SearchRange{-search.hi, -search.lo}, params, &ref);
        const bool horizontal = params.orientation == StereoOrientation::horizontal;
        for (Eigen::Index y = 0; y < img.rows(); ++y)
            for (Eigen::Index x = 0; x < img.cols(); ++x)
            {
                if (!rel.valid(y, x))
                    continue;
                const double u = rel.values(y, x);
                const auto t = std::lround(u);
                const Eigen::Index ty = horizontal ? y : y + t, tx = horizontal ? x + t : x;
                if (!back.valid(ty, tx) || std::abs(back.values(ty, tx) + u) > sensor.consistency_px)
                    rel.invalidate(y, x);
            }
    }

    const double d_ref = sensor.reference_disparity();
    const double d_min = sensor.disparity_min(), d_max = sensor.disparity_max();
    DisparityMap out(img.rows(), img.cols());
    for (Eigen::Index y = 0; y < img.rows(); ++y)
        for (Eigen::Index x = 0; x < img.cols(); ++x)
        {
            if (!rel.valid(y, x))
                continue;
            const double d = rel.values(y, x) + d_ref;
            if (d >= d_min && d <= d_max)
                out.set(y, x, d);
        }
    return out;
}

DepthMap disparity_to_depth(const DisparityMap& disparity, const SensorModel& sensor)
{
    DepthMap out(disparity.rows(), disparity.cols());
    const double fb = sensor.fb();
    for (Eigen::Index y = 0; y < disparity.rows(); ++y)
        for (Eigen::Index x = 0; x < disparity.cols(); ++x)
        {
            if (!disparity.valid(y, x))
                continue;
            const double d = disparity.values(y, x);
            if (!(d > 0.0))
                continue;
            const double z = depth_from_disparity(fb, d);
            if (z >= sensor.depth_range.z_min && z <= sensor.depth_range.z_max)
                out.set(y, x, z);
        }
    return out;
}

} // namespace slsim
