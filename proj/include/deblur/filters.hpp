#pragma once

#include <vector>

#include "deblur/image.hpp"
#include "deblur/kernel.hpp"

namespace deblur {

enum class Boundary { Periodic, Replicate };

// Responses of the forward-difference operators d/dx and d/dy.
struct GradientPair {
    Image gx;
    Image gy;
};

// out(p) = sum_s k(s) in(p - s), per channel.
Image conv2(const Image& image, const Kernel& kernel, Boundary boundary);
// out(p) = sum_s k(s) in(p + s); the adjoint of conv2 under periodic boundary.
Image correlate(const Image& image, const Kernel& kernel, Boundary boundary);
// Periodic convolution evaluated through the FFT.
Image conv2_fft(const Image& image, const Kernel& kernel);

// Forward differences with periodic wrap: gx(x,y) = I(x+1,y) - I(x,y).
GradientPair gradients(const Image& image);
// Adjoint of `gradients`: Gx^T gx + Gy^T gy.
Image gradients_adjoint(const GradientPair& g);
Image gradient_magnitude(const GradientPair& g);

// Separable 1-D filter along x then y with replicated borders; taps are
// centered on index taps.size()/2.
Image separable_filter(const Image& image, const std::vector<double>& taps_x, const std::vector<double>& taps_y);

std::vector<double> gaussian_taps(double sigma);
std::vector<double> gaussian_derivative_taps(double sigma);
Image gaussian_blur(const Image& image, double sigma);

}  // namespace deblur
