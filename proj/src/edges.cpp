#include "deblur/edges.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>

#include "deblur/error.hpp"
#include "deblur/log.hpp"
#include "deblur/parallel.hpp"

namespace deblur {

EdgeMask::EdgeMask(int w, int h, bool value)
    : width(w), height(h), bits(static_cast<std::size_t>(w) * h, value ? 1 : 0), count(value ? bits.size() : 0) {}

void EdgeMask::set(int x, int y, bool value) {
    auto& b = bits[static_cast<std::size_t>(y) * width + x];
    if ((b != 0) == value) return;
    b = value ? 1 : 0;
    value ? ++count : --count;
}

std::vector<PatchIndex> EdgeMask::centers() const {
    std::vector<PatchIndex> out;
    out.reserve(count);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            if ((*this)(x, y)) out.push_back({x, y});
    return out;
}

Image edge_response(const Image& latent, double presmooth_sigma, double derivative_sigma) {
    if (latent.channels() != 1) throw Error(ErrorKind::Channel, "edge response needs a single-channel image");
    const Image smooth = presmooth_sigma > 0 ? gaussian_blur(latent, presmooth_sigma) : latent;
    const auto g = gaussian_taps(derivative_sigma);
    const auto dg = gaussian_derivative_taps(derivative_sigma);
    const Image gx = separable_filter(smooth, dg, g);
    const Image gy = separable_filter(smooth, g, dg);

    std::array<double, 8> c{}, s{};
    for (int k = 0; k < 8; ++k) {
        const double theta = k * std::numbers::pi / 4.0;
        c[k] = std::cos(theta);
        s[k] = std::sin(theta);
    }
    Image out(latent.width(), latent.height());
    const double* px = gx.data().data();
    const double* py = gy.data().data();
    double* po = out.data().data();
    parallel_for(out.plane_size(), [&](std::size_t i) {
        double best = 0.0;
        for (int k = 0; k < 8; ++k) best = std::max(best, std::abs(c[k] * px[i] + s[k] * py[i]));
        po[i] = best;
    });
    return out;
}

EdgeMask dilate_mask(const EdgeMask& mask, int radius) {
    if (radius < 0) throw Error(ErrorKind::Parameter, "dilation radius must be non-negative");
    if (radius == 0) return mask;
    EdgeMask out(mask.width, mask.height);
    for (const auto& c : mask.centers())
        for (int y = std::max(0, c.y - radius); y <= std::min(mask.height - 1, c.y + radius); ++y)
            for (int x = std::max(0, c.x - radius); x <= std::min(mask.width - 1, c.x + radius); ++x)
                if (!out(x, y)) out.set(x, y, true);
    return out;
}

EdgeMask salient_edge_mask(const Image& latent, const EdgeMaskOptions& options) {
    EdgeMask mask(latent.width(), latent.height());
    if (latent.max() == latent.min()) {
        log::warn("edge mask: constant image, no salient edges");
        return mask;
    }
    const Image response = edge_response(latent, options.presmooth_sigma, options.derivative_sigma);
    const auto eligible = all_patch_centers(latent.width(), latent.height(), options.patch_side);
    const auto keep = static_cast<std::size_t>(std::llround(options.keep_fraction * static_cast<double>(eligible.size())));

    std::vector<std::size_t> order(eligible.size());
    std::iota(order.begin(), order.end(), 0);
    auto value = [&](std::size_t i) { return response(eligible[i].x, eligible[i].y); };
    const std::size_t take = std::min(keep, order.size());
    // Eligible centers are already in raster order, so index order breaks ties.
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](std::size_t a, std::size_t b) { return value(a) > value(b) || (value(a) == value(b) && a < b); });
    for (std::size_t i = 0; i < take; ++i) {
        if (!(value(order[i]) > 1e-12)) break;
        mask.set(eligible[order[i]].x, eligible[order[i]].y, true);
    }
    if (mask.count == 0) log::warn("edge mask: no salient edges found");
    return mask;
}

int direction_bin(double gx, double gy) noexcept {
    double theta = std::atan2(gy, gx);
    if (theta < 0) theta += std::numbers::pi;
    const int bin = static_cast<int>(std::lround(theta / (std::numbers::pi / 4.0)));
    return bin % 4;
}

ThresholdState init_threshold(const GradientPair& gradients, int n_h, double r) {
    if (n_h < 3) throw Error(ErrorKind::Parameter, "kernel pixel count must be at least 3");
    if (!(r > 0)) throw Error(ErrorKind::Parameter, "keep factor r must be positive");
    if (!gradients.gx.same_shape(gradients.gy)) throw Error(ErrorKind::Dimension, "gradient images differ in size");
    ThresholdState state;
    state.r = r;
    state.n_h = n_h;

    std::array<std::vector<double>, 4> bins;
    const double* gx = gradients.gx.data().data();
    const double* gy = gradients.gy.data().data();
    for (std::size_t i = 0; i < gradients.gx.plane_size(); ++i) {
        const double m = std::hypot(gx[i], gy[i]);
        if (m > 0) bins[static_cast<std::size_t>(direction_bin(gx[i], gy[i]))].push_back(m);
    }
    const auto need = static_cast<std::size_t>(std::ceil(r * std::sqrt(static_cast<double>(n_h))));
    double tau = INFINITY;
    for (auto& b : bins) {
        if (b.size() < need) {
            log::warn("gradient threshold: a direction bin holds fewer than " + std::to_string(need) +
                      " pixels, threshold set to 0");
            state.tau = 0.0;
            return state;
        }
        std::nth_element(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(need - 1), b.end(), std::greater<>());
        tau = std::min(tau, b[need - 1]);
    }
    state.tau = tau;
    return state;
}

GradientPair truncate_gradients(const GradientPair& gradients, const EdgeMask& mask, const ThresholdState& state) {
    if (!gradients.gx.same_shape(gradients.gy) || gradients.gx.width() != mask.width ||
        gradients.gx.height() != mask.height)
        throw Error(ErrorKind::Dimension, "mask and gradients differ in size");
    GradientPair out{Image(mask.width, mask.height), Image(mask.width, mask.height)};
    const double* gx = gradients.gx.data().data();
    const double* gy = gradients.gy.data().data();
    double* ox = out.gx.data().data();
    double* oy = out.gy.data().data();
    for (std::size_t i = 0; i < mask.bits.size(); ++i) {
        if (mask.bits[i] && std::hypot(gx[i], gy[i]) >= state.tau) {
            ox[i] = gx[i];
            oy[i] = gy[i];
        }
    }
    return out;
}

void write_mask_pgm(const std::string& path, const EdgeMask& mask) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::Io, "cannot write " + path);
    f << "P5\n" << mask.width << ' ' << mask.height << "\n255\n";
    for (auto b : mask.bits) f.put(static_cast<char>(b ? 255 : 0));
}

}  // namespace deblur
