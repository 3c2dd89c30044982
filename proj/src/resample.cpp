#include "deblur/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "deblur/error.hpp"

namespace deblur {
namespace {

constexpr int kLobes = 3;

double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

double lanczos(double x) {
    if (std::abs(x) >= kLobes) return 0.0;
    return sinc(x) * sinc(x / kLobes);
}

struct Tap {
    int index;
    double weight;
};

// Per-output-sample tap lists for one axis, normalized to unit sum.
std::vector<std::vector<Tap>> axis_taps(int in_n, int out_n) {
    const double ratio = static_cast<double>(in_n) / out_n;
    const double stretch = std::max(ratio, 1.0);
    const double support = kLobes * stretch;
    std::vector<std::vector<Tap>> taps(out_n);
    for (int i = 0; i < out_n; ++i) {
        const double center = (i + 0.5) * ratio - 0.5;
        const int lo = static_cast<int>(std::floor(center - support));
        const int hi = static_cast<int>(std::ceil(center + support));
        double total = 0.0;
        for (int j = lo; j <= hi; ++j) {
            const double w = lanczos((j - center) / stretch);
            if (w == 0.0) continue;
            taps[i].push_back({std::clamp(j, 0, in_n - 1), w});
            total += w;
        }
        for (auto& t : taps[i]) t.weight /= total;
    }
    return taps;
}

}  // namespace

Image resample_lanczos(const Image& image, int out_width, int out_height) {
    if (out_width < 1 || out_height < 1) throw Error(ErrorKind::Scale, "resample target must be positive");
    const auto tx = axis_taps(image.width(), out_width);
    const auto ty = axis_taps(image.height(), out_height);
    Image tmp(out_width, image.height(), image.channels());
    Image out(out_width, out_height, image.channels());
    for (int c = 0; c < image.channels(); ++c) {
        for (int y = 0; y < image.height(); ++y)
            for (int x = 0; x < out_width; ++x) {
                double acc = 0.0;
                for (const Tap& t : tx[x]) acc += t.weight * image(t.index, y, c);
                tmp(x, y, c) = acc;
            }
        for (int y = 0; y < out_height; ++y)
            for (int x = 0; x < out_width; ++x) {
                double acc = 0.0;
                for (const Tap& t : ty[y]) acc += t.weight * tmp(x, t.index, c);
                out(x, y, c) = acc;
            }
    }
    return out;
}

Image downscale(const Image& image, double a) {
    if (!(a > 1.0)) throw Error(ErrorKind::Parameter, "down-scaling factor must exceed 1");
    const int w = static_cast<int>(std::lround(image.width() / a));
    const int h = static_cast<int>(std::lround(image.height() / a));
    if (w < kMinResampledSide || h < kMinResampledSide) {
        throw Error(ErrorKind::Scale, "down-scaled image would be " + std::to_string(w) + "x" + std::to_string(h) +
                                          " (minimum side " + std::to_string(kMinResampledSide) + ")");
    }
    return resample_lanczos(image, w, h);
}

Image upscale_bilinear(const Image& image, int out_width, int out_height) {
    Image out(out_width, out_height, image.channels());
    const double sx = static_cast<double>(image.width()) / out_width;
    const double sy = static_cast<double>(image.height()) / out_height;
    for (int c = 0; c < image.channels(); ++c)
        for (int y = 0; y < out_height; ++y) {
            const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, image.height() - 1.0);
            const int y0 = static_cast<int>(fy);
            const int y1 = std::min(y0 + 1, image.height() - 1);
            const double ty = fy - y0;
            for (int x = 0; x < out_width; ++x) {
                const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, image.width() - 1.0);
                const int x0 = static_cast<int>(fx);
                const int x1 = std::min(x0 + 1, image.width() - 1);
                const double tx = fx - x0;
                const double top = (1 - tx) * image(x0, y0, c) + tx * image(x1, y0, c);
                const double bottom = (1 - tx) * image(x0, y1, c) + tx * image(x1, y1, c);
                out(x, y, c) = (1 - ty) * top + ty * bottom;
            }
        }
    return out;
}

int pyramid_depth(int kernel_size, int patch_side, double a) {
    if (kernel_size < 1 || kernel_size % 2 == 0) throw Error(ErrorKind::Parameter, "kernel size must be odd");
    if (patch_side < 3) throw Error(ErrorKind::Parameter, "patch side must be at least 3");
    if (!(a > 1.0)) throw Error(ErrorKind::Parameter, "down-scaling factor must exceed 1");
    int depth = 1;
    while (kernel_size / std::pow(a, depth - 1) >= patch_side) ++depth;
    return depth;
}

Pyramid build_pyramid(const Image& y, int kernel_size, int patch_side, double a) {
    const int depth = pyramid_depth(kernel_size, patch_side, a);
    Pyramid pyr;
    pyr.levels.reserve(depth);
    for (int level = 1; level <= depth; ++level) {
        const double factor = std::pow(a, depth - level);
        if (level == depth) {
            pyr.levels.push_back({y, 1.0});
        } else {
            pyr.levels.push_back({downscale(y, factor), 1.0 / factor});
        }
    }
    return pyr;
}

}  // namespace deblur
