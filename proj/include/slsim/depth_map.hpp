#ifndef SLSIM_DEPTH_MAP_HPP
#define SLSIM_DEPTH_MAP_HPP

#include "slsim/image.hpp"

#include <limits>

namespace slsim
{

/// Per-pixel scalar field with a validity mask; invalid entries hold NaN.
struct ValidatedField
{
    ImageF values;
    Mask valid;

    ValidatedField() = default;
    ValidatedField(Eigen::Index rows, Eigen::Index cols)
        : values(ImageF::Constant(rows, cols, std::numeric_limits< double >::quiet_NaN())),
          valid(Mask::Constant(rows, cols, false))
    {
    }

    [[nodiscard]] Eigen::Index rows() const { return values.rows(); }
    [[nodiscard]] Eigen::Index cols() const { return values.cols(); }
    [[nodiscard]] Eigen::Index valid_count() const { return valid.count(); }

    void set(Eigen::Index y, Eigen::Index x, double v)
    {
        values(y, x) = v;
        valid(y, x) = true;
    }
    void invalidate(Eigen::Index y, Eigen::Index x)
    {
        values(y, x) = std::numeric_limits< double >::quiet_NaN();
        valid(y, x) = false;
    }
};

/// Disparity in pixels along the epipolar axis.
struct DisparityMap : ValidatedField
{
    using ValidatedField::ValidatedField;
};

/// Depth along the optical axis in meters.
struct DepthMap : ValidatedField
{
    using ValidatedField::ValidatedField;
};

} // namespace slsim

#endif // SLSIM_DEPTH_MAP_HPP
