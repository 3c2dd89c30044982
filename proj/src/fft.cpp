#include "deblur/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>

#include "deblur/error.hpp"

namespace deblur {
namespace {

// FFTW's planner is not thread-safe; executing an existing plan on fresh
// aligned buffers is.
struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;
};

std::mutex g_plan_mutex;
std::map<std::pair<int, int>, PlanPair> g_plans;

struct FftwDeleter {
    void operator()(void* p) const { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double, FftwDeleter>;
using ComplexBuffer = std::unique_ptr<fftw_complex, FftwDeleter>;

RealBuffer alloc_real(std::size_t n) { return RealBuffer(fftw_alloc_real(n)); }
ComplexBuffer alloc_complex(std::size_t n) { return ComplexBuffer(fftw_alloc_complex(n)); }

const PlanPair& plans_for(int w, int h) {
    std::lock_guard lock(g_plan_mutex);
    auto it = g_plans.find({w, h});
    if (it != g_plans.end()) return it->second;
    const std::size_t n_real = static_cast<std::size_t>(w) * h;
    const std::size_t n_cplx = static_cast<std::size_t>(h) * (w / 2 + 1);
    auto in = alloc_real(n_real);
    auto out = alloc_complex(n_cplx);
    PlanPair p;
    p.forward = fftw_plan_dft_r2c_2d(h, w, in.get(), out.get(), FFTW_ESTIMATE);
    p.inverse = fftw_plan_dft_c2r_2d(h, w, out.get(), in.get(), FFTW_ESTIMATE);
    return g_plans.emplace(std::make_pair(w, h), p).first->second;
}

}  // namespace

Spectrum fft2(const Image& plane) {
    if (plane.channels() != 1) throw Error(ErrorKind::Channel, "fft2 expects a single channel");
    const int w = plane.width(), h = plane.height();
    const PlanPair& p = plans_for(w, h);
    auto in = alloc_real(plane.size());
    std::copy(plane.data().begin(), plane.data().end(), in.get());
    Spectrum s(w, h);
    auto out = alloc_complex(s.bins.size());
    fftw_execute_dft_r2c(p.forward, in.get(), out.get());
    for (std::size_t i = 0; i < s.bins.size(); ++i) s.bins[i] = {out.get()[i][0], out.get()[i][1]};
    return s;
}

Image ifft2(const Spectrum& s) {
    const int w = s.width, h = s.height;
    const PlanPair& p = plans_for(w, h);
    auto in = alloc_complex(s.bins.size());
    for (std::size_t i = 0; i < s.bins.size(); ++i) {
        in.get()[i][0] = s.bins[i].real();
        in.get()[i][1] = s.bins[i].imag();
    }
    auto out = alloc_real(static_cast<std::size_t>(w) * h);
    fftw_execute_dft_c2r(p.inverse, in.get(), out.get());
    Image img(w, h);
    const double scale = 1.0 / (static_cast<double>(w) * h);
    auto dst = img.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = out.get()[i] * scale;
    return img;
}

Spectrum kernel_otf(const Kernel& kernel, int w, int h) {
    if (kernel.size() > w || kernel.size() > h) {
        throw Error(ErrorKind::Dimension, "kernel larger than the transform grid");
    }
    Image impulse(w, h);
    const int r = kernel.radius();
    for (int v = 0; v < kernel.size(); ++v)
        for (int u = 0; u < kernel.size(); ++u) {
            const int x = ((u - r) % w + w) % w;
            const int y = ((v - r) % h + h) % h;
            impulse(x, y) += kernel(u, v);
        }
    return fft2(impulse);
}

// out(x) = in(x+1) - in(x): impulse response -1 at 0 and +1 at offset -1.
Spectrum dx_otf(int w, int h) {
    Spectrum s(w, h);
    const int cols = s.columns();
    for (int ky = 0; ky < h; ++ky)
        for (int kx = 0; kx < cols; ++kx) {
            const double phase = 2.0 * std::numbers::pi * kx / w;
            s.bins[static_cast<std::size_t>(ky) * cols + kx] = std::polar(1.0, phase) - 1.0;
        }
    return s;
}

Spectrum dy_otf(int w, int h) {
    Spectrum s(w, h);
    const int cols = s.columns();
    for (int ky = 0; ky < h; ++ky) {
        const std::complex<double> v = std::polar(1.0, 2.0 * std::numbers::pi * ky / h) - 1.0;
        for (int kx = 0; kx < cols; ++kx) s.bins[static_cast<std::size_t>(ky) * cols + kx] = v;
    }
    return s;
}

}  // namespace deblur
