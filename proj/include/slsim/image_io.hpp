#ifndef SLSIM_IMAGE_IO_HPP
#define SLSIM_IMAGE_IO_HPP

#include "slsim/depth_map.hpp"
#include "slsim/image.hpp"

#include <filesystem>

namespace slsim
{

/// Grayscale PNG at 8 or 16 bits per sample.
void write_png_gray(const std::filesystem::path& path, const ImageU16& img, int bit_depth);

struct PngImage
{
    int channels = 1;  // 1 (gray) or 3 (rgb); alpha is dropped
    int bit_depth = 8; // 8 or 16
    std::vector< ImageU16 > planes;
};

/// Reads any PNG, expanding palettes and low bit depths to 8 bits.
PngImage read_png(const std::filesystem::path& path);

/// Gray PNG → intensities in [0, 1] (colour images are averaged).
ImageF read_intensity_png(const std::filesystem::path& path);

/// Depth as 16-bit millimeters, 0 = invalid.
void write_depth_png(const std::filesystem::path& path, const DepthMap& depth);
DepthMap read_depth_png(const std::filesystem::path& path);
ImageU16 encode_depth_mm(const DepthMap& depth);

/// Capture or any [0, 1] image as 8- or 16-bit gray.
void write_intensity_png(const std::filesystem::path& path, const ImageF& img, int bit_depth = 8);

/// Little-endian Portable Float Map, rows stored bottom-up per the format; invalid pixels are NaN.
void write_pfm(const std::filesystem::path& path, const ImageF& values);
ImageF read_pfm(const std::filesystem::path& path);

} // namespace slsim

#endif // SLSIM_IMAGE_IO_HPP
