#include "deblur/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "deblur/error.hpp"

namespace deblur {
namespace {

std::string lower_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Image read_png(const std::filesystem::path& path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) throw Error(ErrorKind::Io, "cannot open " + path.string());
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw Error(ErrorKind::Io, path.string() + " is not a PNG file");
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(ErrorKind::Io, "libpng initialization failed");
    }
    std::vector<std::vector<png_byte>> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(ErrorKind::Io, "corrupt PNG " + path.string());
    }
    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const png_byte color = png_get_color_type(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    if (png_get_bit_depth(png, info) == 16) png_set_swap(png);  // little-endian samples
    png_read_update_info(png, info);

    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    const int depth = png_get_bit_depth(png, info);
    const int channels = png_get_channels(png, info);
    rows.assign(h, std::vector<png_byte>(png_get_rowbytes(png, info)));
    std::vector<png_bytep> ptrs(h);
    for (int y = 0; y < h; ++y) ptrs[y] = rows[y].data();
    png_read_image(png, ptrs.data());
    png_destroy_read_struct(&png, &info, nullptr);

    Image img(w, h, channels);
    const double scale = depth == 16 ? 1.0 / 65535.0 : 1.0 / 255.0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < channels; ++c) {
                const std::size_t i = static_cast<std::size_t>(x) * channels + c;
                const unsigned v = depth == 16 ? (rows[y][2 * i] | (rows[y][2 * i + 1] << 8)) : rows[y][i];
                img(x, y, c) = v * scale;
            }
    return img;
}

void write_png(const std::filesystem::path& path, const Image& image, int bit_depth) {
    if (image.channels() != 1 && image.channels() != 3) throw Error(ErrorKind::Channel, "PNG output needs 1 or 3 channels");
    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file) throw Error(ErrorKind::Io, "cannot write " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw Error(ErrorKind::Io, "libpng initialization failed");
    }
    const int w = image.width(), h = image.height(), ch = image.channels();
    const int bytes = bit_depth == 16 ? 2 : 1;
    const double maxval = bit_depth == 16 ? 65535.0 : 255.0;
    std::vector<std::vector<png_byte>> rows(h, std::vector<png_byte>(static_cast<std::size_t>(w) * ch * bytes));
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < ch; ++c) {
                const auto v = static_cast<unsigned>(std::lround(std::clamp(image(x, y, c), 0.0, 1.0) * maxval));
                const std::size_t i = (static_cast<std::size_t>(x) * ch + c) * bytes;
                if (bytes == 2) {
                    rows[y][i] = static_cast<png_byte>(v >> 8);
                    rows[y][i + 1] = static_cast<png_byte>(v & 0xff);
                } else {
                    rows[y][i] = static_cast<png_byte>(v);
                }
            }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error(ErrorKind::Io, "failed writing " + path.string());
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, w, h, static_cast<int>(rows.front().size() / (static_cast<std::size_t>(w) * ch)) * 8, ch == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (auto& row : rows) png_write_row(png, row.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// Reads the next header token, skipping whitespace and '#' comments.
std::string pnm_token(std::istream& in) {
    std::string tok;
    while (in) {
        int c = in.get();
        if (c == '#') {
            std::string skip;
            std::getline(in, skip);
        } else if (std::isspace(c)) {
            if (!tok.empty()) return tok;
        } else if (c != EOF) {
            tok.push_back(static_cast<char>(c));
        }
    }
    return tok;
}

Image read_pnm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    const std::string magic = pnm_token(in);
    if (magic != "P2" && magic != "P3" && magic != "P5" && magic != "P6") {
        throw Error(ErrorKind::Io, path.string() + " is not a PGM/PPM file");
    }
    int w = 0, h = 0, maxval = 0;
    try {
        w = std::stoi(pnm_token(in));
        h = std::stoi(pnm_token(in));
        maxval = std::stoi(pnm_token(in));
    } catch (const std::exception&) {
        throw Error(ErrorKind::Io, "malformed PNM header in " + path.string());
    }
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) throw Error(ErrorKind::Io, "bad PNM header in " + path.string());
    const int channels = (magic == "P3" || magic == "P6") ? 3 : 1;
    const bool binary = magic == "P5" || magic == "P6";
    Image img(w, h, channels);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < channels; ++c) {
                unsigned v = 0;
                if (binary) {
                    if (maxval > 255) {
                        const int hi = in.get(), lo = in.get();
                        v = static_cast<unsigned>((hi << 8) | lo);
                    } else {
                        v = static_cast<unsigned>(in.get());
                    }
                } else {
                    in >> v;
                }
                if (!in) throw Error(ErrorKind::Io, "truncated PNM data in " + path.string());
                img(x, y, c) = static_cast<double>(v) / maxval;
            }
    return img;
}

void write_pnm(const std::filesystem::path& path, const Image& image, int bit_depth) {
    if (image.channels() != 1 && image.channels() != 3) throw Error(ErrorKind::Channel, "PNM output needs 1 or 3 channels");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    const int maxval = bit_depth == 16 ? 65535 : 255;
    out << (image.channels() == 1 ? "P5" : "P6") << '\n' << image.width() << ' ' << image.height() << '\n' << maxval << '\n';
    for (int y = 0; y < image.height(); ++y)
        for (int x = 0; x < image.width(); ++x)
            for (int c = 0; c < image.channels(); ++c) {
                const auto v = static_cast<unsigned>(std::lround(std::clamp(image(x, y, c), 0.0, 1.0) * maxval));
                if (maxval > 255) out.put(static_cast<char>(v >> 8));
                out.put(static_cast<char>(v & 0xff));
            }
}

}  // namespace

Image read_image(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw Error(ErrorKind::Io, "no such file: " + path.string());
    const std::string ext = lower_extension(path);
    if (ext == ".png") return read_png(path);
    if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return read_pnm(path);
    throw Error(ErrorKind::Io, "unsupported image format: " + path.string());
}

void write_image(const std::filesystem::path& path, const Image& image, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16) throw Error(ErrorKind::Parameter, "bit depth must be 8 or 16");
    const std::string ext = lower_extension(path);
    if (ext == ".png") return write_png(path, image, bit_depth);
    if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return write_pnm(path, image, bit_depth);
    throw Error(ErrorKind::Io, "unsupported image format: " + path.string());
}

}  // namespace deblur
