#include "hdrtv/png_io.hpp"

#include <cstdio>
#include <cstring>
#include <png.h>
#include <vector>

namespace hdrtv {

namespace {

struct FileCloser {
    std::FILE* fp = nullptr;
    ~FileCloser() {
        if (fp)
            std::fclose(fp);
    }
};

} // namespace

ImageFrame read_png(const std::string& path) {
    FileCloser file;
    file.fp = std::fopen(path.c_str(), "rb");
    if (!file.fp)
        throw IoError("cannot open: " + path);

    png_byte sig[8];
    if (std::fread(sig, 1, 8, file.fp) != 8 || png_sig_cmp(sig, 0, 8) != 0)
        throw IoError("not a PNG file: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng init failed reading " + path);
    }

    std::vector<png_byte> storage;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("failed to decode PNG: " + path);
    }

    png_init_io(png, file.fp);
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const png_byte color_type = png_get_color_type(png, info);
    const png_byte depth = png_get_bit_depth(png, info);
    if (color_type != PNG_COLOR_TYPE_RGB && color_type != PNG_COLOR_TYPE_RGB_ALPHA) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw UnsupportedFormat("only RGB PNGs are accepted (grayscale/palette "
                                "rejected): " + path);
    }
    if (depth != 8 && depth != 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw UnsupportedFormat("only 8- or 16-bit PNGs are accepted: " + path);
    }
    if (color_type == PNG_COLOR_TYPE_RGB_ALPHA)
        png_set_strip_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    const int h = static_cast<int>(png_get_image_height(png, info));
    const int w = static_cast<int>(png_get_image_width(png, info));
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    storage.resize(static_cast<std::size_t>(h) * rowbytes);
    rows.resize(h);
    for (int y = 0; y < h; ++y)
        rows[y] = storage.data() + static_cast<std::size_t>(y) * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    Tensor pixels(3, h, w);
    if (depth == 8) {
        for (int y = 0; y < h; ++y) {
            const png_byte* row = rows[y];
            for (int x = 0; x < w; ++x)
                for (int c = 0; c < 3; ++c)
                    pixels(c, y, x) = static_cast<float>(row[x * 3 + c]) / 255.0f;
        }
        return ImageFrame(std::move(pixels), Gamut::BT709, Transfer::SdrGamma);
    }
    for (int y = 0; y < h; ++y) {
        const png_byte* row = rows[y];
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) {
                // PNG 16-bit samples are most-significant byte first.
                const std::size_t o = (static_cast<std::size_t>(x) * 3 + c) * 2;
                const std::uint16_t v =
                    static_cast<std::uint16_t>((row[o] << 8) | row[o + 1]);
                pixels(c, y, x) = static_cast<float>(v) / 65535.0f;
            }
        }
    }
    return ImageFrame(std::move(pixels), Gamut::BT2020, Transfer::PQ);
}

void write_png(const ImageFrame& frame, const std::string& path, int bits) {
    if (bits != 8 && bits != 16)
        throw ConfigError("write_png: bits must be 8 or 16");

    const int h = frame.height();
    const int w = frame.width();
    const Tensor& px = frame.pixels();
    const std::size_t rowbytes = static_cast<std::size_t>(w) * 3 * (bits / 8);
    std::vector<png_byte> storage(static_cast<std::size_t>(h) * rowbytes);
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y) {
        png_byte* row = storage.data() + static_cast<std::size_t>(y) * rowbytes;
        rows[y] = row;
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) {
                const std::uint16_t code = quantize_value(px(c, y, x), bits);
                if (bits == 8) {
                    row[x * 3 + c] = static_cast<png_byte>(code);
                } else {
                    row[(x * 3 + c) * 2] = static_cast<png_byte>(code >> 8);
                    row[(x * 3 + c) * 2 + 1] = static_cast<png_byte>(code & 0xff);
                }
            }
        }
    }

    FileCloser file;
    file.fp = std::fopen(path.c_str(), "wb");
    if (!file.fp)
        throw IoError("cannot open for writing: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng init failed writing " + path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("failed to encode PNG: " + path);
    }

    png_init_io(png, file.fp);
    png_set_IHDR(png, info, w, h, bits, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace hdrtv
