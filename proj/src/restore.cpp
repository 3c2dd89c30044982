#include "deblur/restore.hpp"

#include <cmath>
#include <complex>

#include "deblur/edge_taper.hpp"
#include "deblur/error.hpp"
#include "deblur/fft.hpp"
#include "deblur/filters.hpp"

namespace deblur {
namespace {

using cd = std::complex<double>;

double penalty(double v, double alpha) { return alpha == 1.0 ? std::abs(v) : std::pow(std::abs(v), alpha); }

double shrink(double g, double beta, double alpha) {
    if (alpha == 1.0) return std::copysign(std::max(std::abs(g) - 1.0 / beta, 0.0), g);
    return shrink_hyper_laplacian(g, beta, alpha);
}

Image wiener(const Image& y, const Kernel& kernel, double weight) {
    const int w = y.width(), h = y.height();
    const Spectrum k = kernel_otf(kernel, w, h), dx = dx_otf(w, h), dy = dy_otf(w, h);
    Spectrum s = fft2(y);
    for (std::size_t i = 0; i < s.bins.size(); ++i) {
        const double den = std::norm(k.bins[i]) + weight * (std::norm(dx.bins[i]) + std::norm(dy.bins[i]));
        s.bins[i] = den > 0 ? std::conj(k.bins[i]) * s.bins[i] / den : s.bins[i];
    }
    return ifft2(s);
}

// Half-quadratic splitting of |k*x - y|^2 + weight * sum |grad x|^alpha.
Image split_deconvolve(const Image& y, const Kernel& kernel, const RestoreConfig& cfg, double alpha,
                       std::vector<double>* energy) {
    const int w = y.width(), h = y.height();
    const Spectrum k = kernel_otf(kernel, w, h), dx = dx_otf(w, h), dy = dy_otf(w, h);
    const Spectrum ys = fft2(y);
    std::vector<cd> kty(ys.bins.size());
    std::vector<double> k2(ys.bins.size()), d2(ys.bins.size());
    for (std::size_t i = 0; i < ys.bins.size(); ++i) {
        kty[i] = std::conj(k.bins[i]) * ys.bins[i];
        k2[i] = std::norm(k.bins[i]);
        d2[i] = std::norm(dx.bins[i]) + std::norm(dy.bins[i]);
    }

    Image x = y;
    Image vx(w, h), vy(w, h);
    const int iters = cfg.iterations;
    for (int it = 0; it < iters; ++it) {
        const double beta =
            iters > 1 ? cfg.beta_min * std::pow(cfg.beta_max / cfg.beta_min, static_cast<double>(it) / (iters - 1))
                      : cfg.beta_max;
        GradientPair g = gradients(x);
        for (std::size_t i = 0; i < x.size(); ++i) {
            vx.data()[i] = shrink(g.gx.data()[i], beta, alpha);
            vy.data()[i] = shrink(g.gy.data()[i], beta, alpha);
        }
        const double c = cfg.weight * beta / 2.0;
        const Spectrum fvx = fft2(vx), fvy = fft2(vy);
        Spectrum s(w, h);
        for (std::size_t i = 0; i < s.bins.size(); ++i) {
            const cd num = kty[i] + c * (std::conj(dx.bins[i]) * fvx.bins[i] + std::conj(dy.bins[i]) * fvy.bins[i]);
            const double den = k2[i] + c * d2[i];
            s.bins[i] = den > 0 ? num / den : ys.bins[i];
        }
        x = ifft2(s);

        if (energy) {
            const double data = squared_distance(conv2_fft(x, kernel), y);
            const GradientPair gx = gradients(x);
            double prior = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double ex = vx.data()[i] - gx.gx.data()[i], ey = vy.data()[i] - gx.gy.data()[i];
                prior += penalty(vx.data()[i], alpha) + penalty(vy.data()[i], alpha) + beta / 2.0 * (ex * ex + ey * ey);
            }
            energy->push_back(data + cfg.weight * prior);
        }
    }
    return x;
}

}  // namespace

RestoreMethod parse_restore_method(const std::string& name) {
    if (name == "wiener") return RestoreMethod::Wiener;
    if (name == "hyper_laplacian") return RestoreMethod::HyperLaplacian;
    if (name == "tv_l1") return RestoreMethod::TvL1;
    throw Error(ErrorKind::Parameter, "unknown restore method '" + name + "'");
}

std::string to_string(RestoreMethod method) {
    switch (method) {
        case RestoreMethod::Wiener: return "wiener";
        case RestoreMethod::HyperLaplacian: return "hyper_laplacian";
        case RestoreMethod::TvL1: return "tv_l1";
    }
    return "unknown";
}

void RestoreConfig::validate() const {
    if (!(weight > 0)) throw Error(ErrorKind::Parameter, "restore weight must be positive");
    if (iterations < 1) throw Error(ErrorKind::Parameter, "restore iterations must be positive");
    if (!(alpha > 0 && alpha <= 1)) throw Error(ErrorKind::Parameter, "hyper-Laplacian exponent must lie in (0, 1]");
    if (!(beta_min > 0 && beta_max >= beta_min)) throw Error(ErrorKind::Parameter, "invalid beta schedule");
}

double shrink_hyper_laplacian(double g, double beta, double alpha) {
    const double a = std::abs(g);
    if (a == 0.0) return 0.0;
    // phi(v) = alpha v^(alpha-1) + beta v is convex on v > 0 with its minimum at v*.
    const double vstar = std::pow(alpha * (1.0 - alpha) / beta, 1.0 / (2.0 - alpha));
    auto phi = [&](double v) { return alpha * std::pow(v, alpha - 1.0) + beta * v; };
    if (vstar >= a || phi(vstar) > beta * a) return 0.0;
    // Newton from the right converges monotonically to the larger root.
    double v = a;
    for (int i = 0; i < 60; ++i) {
        const double f = phi(v) - beta * a;
        const double df = alpha * (alpha - 1.0) * std::pow(v, alpha - 2.0) + beta;
        const double step = f / df;
        v -= step;
        if (v < vstar) {
            v = vstar;
            break;
        }
        if (std::abs(step) <= 1e-15 * v) break;
    }
    const double at_v = std::pow(v, alpha) + beta / 2.0 * (v - a) * (v - a);
    const double at_0 = beta / 2.0 * a * a;
    return at_v < at_0 ? std::copysign(v, g) : 0.0;
}

Image deconvolve(const Image& y, const Kernel& kernel, const RestoreConfig& cfg, RestoreTrace* trace) {
    cfg.validate();
    if (kernel.size() > y.width() || kernel.size() > y.height())
        throw Error(ErrorKind::Dimension, "kernel larger than the image");
    if (!kernel.is_normalized(1e-6)) throw Error(ErrorKind::Parameter, "kernel must sum to one");
    Image out(y.width(), y.height(), y.channels());
    if (kernel.is_delta()) {
        out = y;
        return out.clamp(0.0, 1.0);
    }
    for (int c = 0; c < y.channels(); ++c) {
        Image ch = y.channel(c);
        if (cfg.taper) ch = edge_taper(ch, kernel);
        Image res;
        std::vector<double>* energy = trace && c == 0 ? &trace->energy : nullptr;
        switch (cfg.method) {
            case RestoreMethod::Wiener: res = wiener(ch, kernel, cfg.weight); break;
            case RestoreMethod::HyperLaplacian: res = split_deconvolve(ch, kernel, cfg, cfg.alpha, energy); break;
            case RestoreMethod::TvL1: res = split_deconvolve(ch, kernel, cfg, 1.0, energy); break;
        }
        out.set_channel(c, res);
    }
    return out.clamp(0.0, 1.0);
}

}  // namespace deblur
