#pragma once

#include <cstdint>

#include "deblur/filters.hpp"
#include "deblur/image.hpp"
#include "deblur/kernel.hpp"

namespace deblur {

// Camera-shake style kernel: a smooth random walk with momentum, splatted
// bilinearly, shifted so its centroid sits on the center tap, normalized.
Kernel motion_kernel(int size, std::uint64_t seed);

// y = conv2(x, h) + n with n ~ N(0, (noise_percent / 100)^2), replicated
// borders. Values are not clamped.
Image synthesize_blur(const Image& sharp, const Kernel& kernel, double noise_percent, std::uint64_t seed,
                      Boundary boundary = Boundary::Replicate);

}  // namespace deblur
