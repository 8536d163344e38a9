#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <png.h>

#include "rfdd/color.hpp"
#include "rfdd/tensor.hpp"
#include "rfdd/weights.hpp"

namespace rfdd {

namespace detail {

struct PngReader {
    FILE* fp = nullptr;
    png_structp png = nullptr;
    png_infop info = nullptr;

    ~PngReader() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

struct PngWriter {
    FILE* fp = nullptr;
    png_structp png = nullptr;
    png_infop info = nullptr;

    ~PngWriter() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (fp) std::fclose(fp);
    }
};

// Decodes an 8-bit PNG into interleaved rows with the requested channel
// count (3 = RGB, 1 = gray). 16-bit input is rejected, alpha is dropped.
inline std::vector<unsigned char> read_png_rows(const std::filesystem::path& path, int want_channels,
                                                int& width, int& height) {
    PngReader r;
    r.fp = std::fopen(path.string().c_str(), "rb");
    if (!r.fp) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!r.png) throw IoError("libpng: failed to allocate read struct");
    r.info = png_create_info_struct(r.png);
    if (!r.info) throw IoError("libpng: failed to allocate info struct");
    if (setjmp(png_jmpbuf(r.png))) {
        throw FormatError("'" + path.string() + "' is not a decodable PNG file");
    }
    png_init_io(r.png, r.fp);
    png_read_info(r.png, r.info);

    const int bit_depth = png_get_bit_depth(r.png, r.info);
    const int color_type = png_get_color_type(r.png, r.info);
    if (bit_depth == 16) {
        throw FormatError("'" + path.string() + "': 16-bit PNG is not supported, re-encode as 8-bit");
    }
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(r.png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(r.png);
    if (png_get_valid(r.png, r.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(r.png);
    png_set_strip_alpha(r.png);
    if (want_channels == 3) {
        if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
            png_set_gray_to_rgb(r.png);
        }
    } else {
        if (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_GRAY_ALPHA) {
            png_set_rgb_to_gray_fixed(r.png, 1, -1, -1);
        }
    }
    png_read_update_info(r.png, r.info);

    width = static_cast<int>(png_get_image_width(r.png, r.info));
    height = static_cast<int>(png_get_image_height(r.png, r.info));
    const std::size_t row_bytes = png_get_rowbytes(r.png, r.info);
    if (row_bytes != static_cast<std::size_t>(width) * want_channels) {
        throw FormatError("'" + path.string() + "': unexpected decoded row layout");
    }
    std::vector<unsigned char> pixels(static_cast<std::size_t>(height) * row_bytes);
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) {
        rows[static_cast<std::size_t>(y)] = pixels.data() + static_cast<std::size_t>(y) * row_bytes;
    }
    png_read_image(r.png, rows.data());
    png_read_end(r.png, nullptr);
    return pixels;
}

inline void write_png_rows(const std::filesystem::path& path,
                           const std::vector<unsigned char>& pixels, int width, int height,
                           int channels) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        PngWriter w;
        w.fp = std::fopen(tmp.string().c_str(), "wb");
        if (!w.fp) {
            throw IoError("cannot open '" + tmp.string() + "' for writing");
        }
        w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        if (!w.png) throw IoError("libpng: failed to allocate write struct");
        w.info = png_create_info_struct(w.png);
        if (!w.info) throw IoError("libpng: failed to allocate info struct");
        if (setjmp(png_jmpbuf(w.png))) {
            throw IoError("write failed for '" + tmp.string() + "'");
        }
        png_init_io(w.png, w.fp);
        png_set_IHDR(w.png, w.info, static_cast<png_uint_32>(width),
                     static_cast<png_uint_32>(height), 8,
                     channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(w.png, w.info);
        std::vector<png_bytep> rows(static_cast<std::size_t>(height));
        const std::size_t row_bytes = static_cast<std::size_t>(width) * channels;
        for (int y = 0; y < height; ++y) {
            rows[static_cast<std::size_t>(y)] =
                const_cast<png_bytep>(pixels.data() + static_cast<std::size_t>(y) * row_bytes);
        }
        png_write_image(w.png, rows.data());
        png_write_end(w.png, nullptr);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " +
                      ec.message());
    }
}

inline unsigned char to_byte(float v) {
    return static_cast<unsigned char>(std::lround(clampf(v, 0.0f, 1.0f) * 255.0f));
}

}  // namespace detail

// 8-bit RGB PNG -> planes in [0, 1] (byte v maps to v/255).
inline RgbImage load_image(const std::filesystem::path& path) {
    int width = 0, height = 0;
    const std::vector<unsigned char> pixels = detail::read_png_rows(path, 3, width, height);
    Tensor t(3, height, width);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const std::size_t p = (static_cast<std::size_t>(y) * width + x) * 3;
            t.at(0, y, x) = pixels[p] / 255.0f;
            t.at(1, y, x) = pixels[p + 1] / 255.0f;
            t.at(2, y, x) = pixels[p + 2] / 255.0f;
        }
    }
    return RgbImage::ingest(std::move(t));
}

inline void save_image(const RgbImage& img, const std::filesystem::path& path) {
    const int height = img.height();
    const int width = img.width();
    std::vector<unsigned char> pixels(static_cast<std::size_t>(height) * width * 3);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const std::size_t p = (static_cast<std::size_t>(y) * width + x) * 3;
            pixels[p] = detail::to_byte(img.planes.at(0, y, x));
            pixels[p + 1] = detail::to_byte(img.planes.at(1, y, x));
            pixels[p + 2] = detail::to_byte(img.planes.at(2, y, x));
        }
    }
    detail::write_png_rows(path, pixels, width, height, 3);
}

// Single-channel plane -> 8-bit grayscale PNG.
inline void save_gray(const Tensor& plane, const std::filesystem::path& path) {
    if (plane.channels != 1) {
        throw std::invalid_argument("save_gray: expected a single-channel tensor, got " +
                                    plane.shape_str());
    }
    std::vector<unsigned char> pixels(plane.plane_size());
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        pixels[i] = detail::to_byte(plane.data[i]);
    }
    detail::write_png_rows(path, pixels, plane.width, plane.height, 1);
}

inline Tensor load_gray(const std::filesystem::path& path) {
    int width = 0, height = 0;
    const std::vector<unsigned char> pixels = detail::read_png_rows(path, 1, width, height);
    Tensor t(1, height, width);
    for (std::size_t i = 0; i < t.data.size(); ++i) {
        t.data[i] = pixels[i] / 255.0f;
    }
    return t;
}

}  // namespace rfdd
