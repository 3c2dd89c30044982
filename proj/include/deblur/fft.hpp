#pragma once

#include <complex>
#include <vector>

#include "deblur/image.hpp"
#include "deblur/kernel.hpp"

namespace deblur {

// Half-plane spectrum of a real single-channel image: height rows of
// (width/2 + 1) complex bins.
struct Spectrum {
    int width = 0;
    int height = 0;
    std::vector<std::complex<double>> bins;

    Spectrum() = default;
    Spectrum(int w, int h) : width(w), height(h), bins(static_cast<std::size_t>(h) * (w / 2 + 1)) {}
    int columns() const noexcept { return width / 2 + 1; }
};

Spectrum fft2(const Image& plane);
Image ifft2(const Spectrum& spectrum);

// Transfer function of `kernel` under periodic convolution on a w x h grid
// (the kernel center is moved to the origin).
Spectrum kernel_otf(const Kernel& kernel, int w, int h);

// Transfer functions of the forward-difference operators (periodic).
Spectrum dx_otf(int w, int h);
Spectrum dy_otf(int w, int h);

}  // namespace deblur
