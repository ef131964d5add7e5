#ifndef SLSIM_IMAGE_HPP
#define SLSIM_IMAGE_HPP

#include <Eigen/Core>

#include <cmath>
#include <cstdint>

namespace slsim
{

/// Row-major raster; coefficient (row, col) is pixel (y, x).
template < typename Scalar >
using Image = Eigen::Array< Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor >;

using ImageF = Image< double >;
using ImageU16 = Image< std::uint16_t >;
using Mask = Image< bool >;

/// Bilinear lookup at continuous pixel coordinates (pixel centers at integers).
/// Samples outside the raster read as `outside`.
template < typename Derived >
typename Derived::Scalar sample_bilinear(const Eigen::ArrayBase< Derived >& img, double x, double y,
                                         typename Derived::Scalar outside = 0)
{
    using Scalar = typename Derived::Scalar;
    const Eigen::Index w = img.cols();
    const Eigen::Index h = img.rows();
    if (!(x > -1.0) || !(y > -1.0) || !(x < double(w)) || !(y < double(h)))
        return outside;

    const double fx = std::floor(x);
    const double fy = std::floor(y);
    const auto x0 = static_cast< Eigen::Index >(fx);
    const auto y0 = static_cast< Eigen::Index >(fy);
    const double ax = x - fx;
    const double ay = y - fy;

    auto at = [&](Eigen::Index xx, Eigen::Index yy) -> double {
        if (xx < 0 || yy < 0 || xx >= w || yy >= h)
            return double(outside);
        return double(img(yy, xx));
    };
    const double top = (1.0 - ax) * at(x0, y0) + ax * at(x0 + 1, y0);
    const double bottom = (1.0 - ax) * at(x0, y0 + 1) + ax * at(x0 + 1, y0 + 1);
    return Scalar((1.0 - ay) * top + ay * bottom);
}

/// Number of quantization levels above zero for a given ADC depth.
inline int max_level(int bit_depth) { return (1 << bit_depth) - 1; }

/// Maps [0,1] intensities onto integer ADC levels.
inline ImageU16 to_levels(const ImageF& img, int bit_depth)
{
    const double top = max_level(bit_depth);
    return img.unaryExpr([top](double v) {
                  const double c = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
                  return static_cast< std::uint16_t >(std::lround(c * top));
              })
        .eval();
}

inline ImageF from_levels(const ImageU16& img, int bit_depth)
{
    const double top = max_level(bit_depth);
    return (img.cast< double >() / top).eval();
}

} // namespace slsim

#endif // SLSIM_IMAGE_HPP
