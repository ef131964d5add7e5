#include "slsim/image_io.hpp"

#include "slsim/error.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

namespace slsim
{
namespace
{

struct FileCloser
{
    void operator()(std::FILE* f) const
    {
        if (f)
            std::fclose(f);
    }
};
using FilePtr = std::unique_ptr< std::FILE, FileCloser >;

FilePtr open_file(const std::filesystem::path& path, const char* mode)
{
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f)
        throw IoError(std::string("cannot open ") + path.string() + (mode[0] == 'w' ? " for writing" : ""));
    return f;
}

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg)
{
    auto* text = static_cast< std::string* >(png_get_error_ptr(png));
    if (text)
        *text = msg;
    png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

} // namespace

void write_png_gray(const std::filesystem::path& path, const ImageU16& img, int bit_depth)
{
    if (bit_depth != 8 && bit_depth != 16)
        throw std::invalid_argument("PNG bit depth must be 8 or 16");
    auto file = open_file(path, "wb");
    std::string error;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_error_fn, png_warning_fn);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info)
    {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng initialisation failed for " + path.string());
    }
    const int w = int(img.cols()), h = int(img.rows());
    const int bpp = bit_depth / 8;
    std::vector< png_byte > rows(std::size_t(w) * h * bpp);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
        {
            const std::uint16_t v = img(y, x);
            png_byte* p = rows.data() + (std::size_t(y) * w + x) * bpp;
            if (bpp == 1)
                p[0] = png_byte(std::min< std::uint16_t >(v, 255));
            else
            {
                p[0] = png_byte(v >> 8); // PNG samples are big-endian
                p[1] = png_byte(v & 0xff);
            }
        }
    if (setjmp(png_jmpbuf(png)))
    {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG write failed for " + path.string() + ": " + error);
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, png_uint_32(w), png_uint_32(h), bit_depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < h; ++y)
        png_write_row(png, rows.data() + std::size_t(y) * w * bpp);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

PngImage read_png(const std::filesystem::path& path)
{
    auto file = open_file(path, "rb");
    png_byte sig[8];
    if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
        throw FormatError(path.string() + ": not a PNG file");
    std::string error;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_error_fn, png_warning_fn);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info)
    {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng initialisation failed for " + path.string());
    }
    PngImage out;
    std::vector< png_byte > buffer;
    std::vector< png_bytep > row_ptrs;
    if (setjmp(png_jmpbuf(png)))
    {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError(path.string() + ": " + error);
    }
    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    const auto color = png_get_color_type(png, info);
    int depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (color & PNG_COLOR_MASK_ALPHA)
        png_set_strip_alpha(png);
    png_read_update_info(png, info);
    const int w = int(png_get_image_width(png, info)), h = int(png_get_image_height(png, info));
    depth = png_get_bit_depth(png, info);
    const int channels = png_get_channels(png, info);
    const std::size_t stride = png_get_rowbytes(png, info);
    buffer.resize(stride * h);
    row_ptrs.resize(h);
    for (int y = 0; y < h; ++y)
        row_ptrs[y] = buffer.data() + stride * y;
    png_read_image(png, row_ptrs.data());
    png_destroy_read_struct(&png, &info, nullptr);

    out.channels = channels >= 3 ? 3 : 1;
    out.bit_depth = depth;
    out.planes.assign(out.channels, ImageU16(h, w));
    const int bps = depth == 16 ? 2 : 1;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < out.channels; ++c)
            {
                const png_byte* p = buffer.data() + stride * y + (std::size_t(x) * channels + c) * bps;
                out.planes[c](y, x) = bps == 2 ? std::uint16_t((p[0] << 8) | p[1]) : std::uint16_t(p[0]);
            }
    return out;
}

ImageF read_intensity_png(const std::filesystem::path& path)
{
    const PngImage png = read_png(path);
    const double top = png.bit_depth == 16 ? 65535.0 : 255.0;
    ImageF sum = ImageF::Zero(png.planes[0].rows(), png.planes[0].cols());
    for (const auto& plane : png.planes)
        sum += plane.cast< double >();
    return sum / (top * double(png.planes.size()));
}

ImageU16 encode_depth_mm(const DepthMap& depth)
{
    ImageU16 mm = ImageU16::Zero(depth.rows(), depth.cols());
    for (Eigen::Index i = 0; i < mm.size(); ++i)
        if (depth.valid.data()[i])
        {
            const double v = std::round(depth.values.data()[i] * 1000.0);
            mm.data()[i] = std::uint16_t(std::clamp(v, 1.0, 65535.0));
        }
    return mm;
}

void write_depth_png(const std::filesystem::path& path, const DepthMap& depth)
{
    write_png_gray(path, encode_depth_mm(depth), 16);
}

DepthMap read_depth_png(const std::filesystem::path& path)
{
    const PngImage png = read_png(path);
    if (png.channels != 1 || png.bit_depth != 16)
        throw FormatError(path.string() + ": depth PNG must be 16-bit grayscale");
    const ImageU16& mm = png.planes[0];
    DepthMap out(mm.rows(), mm.cols());
    for (Eigen::Index y = 0; y < mm.rows(); ++y)
        for (Eigen::Index x = 0; x < mm.cols(); ++x)
            if (mm(y, x) != 0)
                out.set(y, x, mm(y, x) / 1000.0);
    return out;
}

void write_intensity_png(const std::filesystem::path& path, const ImageF& img, int bit_depth)
{
    const double top = bit_depth == 16 ? 65535.0 : 255.0;
    const ImageU16 q = img.unaryExpr([top](double v) {
                              return std::uint16_t(std::lround(std::clamp(std::isfinite(v) ? v : 0.0, 0.0, 1.0) * top));
                          })
                           .eval();
    write_png_gray(path, q, bit_depth);
}

void write_pfm(const std::filesystem::path& path, const ImageF& values)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << "Pf\n" << values.cols() << " " << values.rows() << "\n-1.0\n";
    std::vector< float > row(values.cols());
    for (Eigen::Index y = values.rows() - 1; y >= 0; --y)
    {
        for (Eigen::Index x = 0; x < values.cols(); ++x)
            row[x] = float(values(y, x));
        out.write(reinterpret_cast< const char* >(row.data()), std::streamsize(row.size() * sizeof(float)));
    }
    if (!out)
        throw IoError("write failed for " + path.string());
}

ImageF read_pfm(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::string magic;
    long w = 0, h = 0;
    double scale = 0;
    in >> magic >> w >> h >> scale;
    in.get();
    if (magic != "Pf" || w <= 0 || h <= 0 || scale >= 0)
        throw FormatError(path.string() + ": expected little-endian single-channel PFM");
    ImageF out(h, w);
    std::vector< float > row(w);
    for (long y = h - 1; y >= 0; --y)
    {
        in.read(reinterpret_cast< char* >(row.data()), std::streamsize(row.size() * sizeof(float)));
        if (!in)
            throw FormatError(path.string() + ": truncated PFM data");
        for (long x = 0; x < w; ++x)
            out(y, x) = row[x];
    }
    return out;
}

} // namespace slsim
