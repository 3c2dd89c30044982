#include "deblur/filters.hpp"

#include <cmath>

#include "deblur/error.hpp"
#include "deblur/fft.hpp"
#include "deblur/parallel.hpp"

namespace deblur {
namespace {

void check_kernel_fits(const Image& image, const Kernel& kernel) {
    if (kernel.size() > image.width() || kernel.size() > image.height()) {
        throw Error(ErrorKind::Dimension, "kernel larger than image");
    }
}

template <int Sign>
Image filter_direct(const Image& image, const Kernel& kernel, Boundary boundary) {
    check_kernel_fits(image, kernel);
    Image out(image.width(), image.height(), image.channels());
    const int r = kernel.radius();
    const int w = image.width(), h = image.height();
    parallel_for(static_cast<std::size_t>(image.channels()) * h, [&](std::size_t row) {
        const int c = static_cast<int>(row / h);
        const int y = static_cast<int>(row % h);
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int v = 0; v < kernel.size(); ++v) {
                const int sy = y - Sign * (v - r);
                for (int u = 0; u < kernel.size(); ++u) {
                    const double k = kernel(u, v);
                    if (k == 0.0) continue;
                    const int sx = x - Sign * (u - r);
                    acc += k * (boundary == Boundary::Periodic ? image.wrapped(sx, sy, c) : image.clamped(sx, sy, c));
                }
            }
            out(x, y, c) = acc;
        }
    });
    return out;
}

std::vector<double> normalized(std::vector<double> taps) {
    double s = 0.0;
    for (double t : taps) s += t;
    for (double& t : taps) t /= s;
    return taps;
}

}  // namespace

Image conv2(const Image& image, const Kernel& kernel, Boundary boundary) {
    if (boundary == Boundary::Periodic && kernel.size() > 15) return conv2_fft(image, kernel);
    return filter_direct<1>(image, kernel, boundary);
}

Image correlate(const Image& image, const Kernel& kernel, Boundary boundary) {
    return filter_direct<-1>(image, kernel, boundary);
}

Image conv2_fft(const Image& image, const Kernel& kernel) {
    check_kernel_fits(image, kernel);
    const Spectrum otf = kernel_otf(kernel, image.width(), image.height());
    Image out(image.width(), image.height(), image.channels());
    for (int c = 0; c < image.channels(); ++c) {
        Spectrum s = fft2(image.channel(c));
        for (std::size_t i = 0; i < s.bins.size(); ++i) s.bins[i] *= otf.bins[i];
        out.set_channel(c, ifft2(s));
    }
    return out;
}

GradientPair gradients(const Image& image) {
    if (image.channels() != 1) throw Error(ErrorKind::Channel, "gradients expect a single-channel image");
    const int w = image.width(), h = image.height();
    GradientPair g{Image(w, h), Image(w, h)};
    for (int y = 0; y < h; ++y) {
        const int yn = y + 1 == h ? 0 : y + 1;
        for (int x = 0; x < w; ++x) {
            const int xn = x + 1 == w ? 0 : x + 1;
            g.gx(x, y) = image(xn, y) - image(x, y);
            g.gy(x, y) = image(x, yn) - image(x, y);
        }
    }
    return g;
}

Image gradients_adjoint(const GradientPair& g) {
    const int w = g.gx.width(), h = g.gx.height();
    Image out(w, h);
    for (int y = 0; y < h; ++y) {
        const int yp = y == 0 ? h - 1 : y - 1;
        for (int x = 0; x < w; ++x) {
            const int xp = x == 0 ? w - 1 : x - 1;
            out(x, y) = (g.gx(xp, y) - g.gx(x, y)) + (g.gy(x, yp) - g.gy(x, y));
        }
    }
    return out;
}

Image gradient_magnitude(const GradientPair& g) {
    Image out(g.gx.width(), g.gx.height());
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = std::hypot(g.gx.data()[i], g.gy.data()[i]);
    return out;
}

Image separable_filter(const Image& image, const std::vector<double>& taps_x, const std::vector<double>& taps_y) {
    const int w = image.width(), h = image.height();
    const int rx = static_cast<int>(taps_x.size()) / 2, ry = static_cast<int>(taps_y.size()) / 2;
    Image tmp(w, h, image.channels()), out(w, h, image.channels());
    for (int c = 0; c < image.channels(); ++c) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int i = 0; i < static_cast<int>(taps_x.size()); ++i) acc += taps_x[i] * image.clamped(x + rx - i, y, c);
                tmp(x, y, c) = acc;
            }
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int i = 0; i < static_cast<int>(taps_y.size()); ++i) acc += taps_y[i] * tmp.clamped(x, y + ry - i, c);
                out(x, y, c) = acc;
            }
    }
    return out;
}

std::vector<double> gaussian_taps(double sigma) {
    const int r = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> taps(2 * r + 1);
    for (int i = -r; i <= r; ++i) taps[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
    return normalized(std::move(taps));
}

// Taps of dG/dt laid out for convolution (index i holds offset i - r), so the
// response to a rising ramp is positive.
std::vector<double> gaussian_derivative_taps(double sigma) {
    const int r = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> taps(2 * r + 1);
    double norm = 0.0;
    for (int i = -r; i <= r; ++i) {
        const double g = std::exp(-0.5 * i * i / (sigma * sigma));
        taps[i + r] = -i * g;
        norm += i * i * g;
    }
    for (double& t : taps) t /= norm;
    return taps;
}

Image gaussian_blur(const Image& image, double sigma) {
    if (sigma <= 0.0) return image;
    const auto taps = gaussian_taps(sigma);
    return separable_filter(image, taps, taps);
}

}  // namespace deblur
