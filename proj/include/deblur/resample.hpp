#pragma once

#include <vector>

#include "deblur/image.hpp"

namespace deblur {

inline constexpr int kMinResampledSide = 8;

// Lanczos-3 windowed-sinc down-scaling by factor a > 1; output sides are
// round(side / a). The filter is stretched by the actual per-axis ratio so it
// band-limits to the output Nyquist rate. Throws Scale when an output side
// would fall below kMinResampledSide.
Image downscale(const Image& image, double a);

// Lanczos-3 resampling to explicit output dimensions (down-scaling only
// stretches the filter when the ratio exceeds 1).
Image resample_lanczos(const Image& image, int out_width, int out_height);

// Bilinear interpolation with pixel-center alignment.
Image upscale_bilinear(const Image& image, int out_width, int out_height);

struct PyramidLevel {
    Image image;
    double scale = 1.0;  // relative to the original resolution
};

// Coarsest level first; the last level is the input itself.
struct Pyramid {
    std::vector<PyramidLevel> levels;
    int depth() const noexcept { return static_cast<int>(levels.size()); }
};

// Smallest L >= 1 with kernel_size / a^(L-1) < patch_side.
int pyramid_depth(int kernel_size, int patch_side, double a);

Pyramid build_pyramid(const Image& y, int kernel_size, int patch_side, double a);

}  // namespace deblur
