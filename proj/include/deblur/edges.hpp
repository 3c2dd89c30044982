#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deblur/filters.hpp"
#include "deblur/image.hpp"
#include "deblur/patches.hpp"

namespace deblur {

struct EdgeMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;
    std::size_t count = 0;

    EdgeMask() = default;
    EdgeMask(int w, int h, bool value = false);

    bool operator()(int x, int y) const noexcept { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool value);
    // True pixels in raster order, as patch centers.
    std::vector<PatchIndex> centers() const;
};

struct ThresholdState {
    double tau = 0.0;
    double r = 2.0;
    int n_h = 0;

    void advance() noexcept { tau /= 1.1; }
};

struct EdgeMaskOptions {
    double keep_fraction = 0.02;
    double presmooth_sigma = 1.0;
    double derivative_sigma = 1.0;
    int patch_side = 5;  // border band kept clear so every selected patch fits
};

// Max over eight derivative-of-Gaussian orientations of |response|.
Image edge_response(const Image& latent, double presmooth_sigma = 1.0, double derivative_sigma = 1.0);

EdgeMask salient_edge_mask(const Image& latent, const EdgeMaskOptions& options = {});

// Square dilation; the result may reach into the border band.
EdgeMask dilate_mask(const EdgeMask& mask, int radius);

// 0..3 for 0, 45, 90, 135 degrees with opposite directions merged.
int direction_bin(double gx, double gy) noexcept;

ThresholdState init_threshold(const GradientPair& gradients, int n_h, double r = 2.0);

GradientPair truncate_gradients(const GradientPair& gradients, const EdgeMask& mask, const ThresholdState& state);

// 0/255 binary PGM.
void write_mask_pgm(const std::string& path, const EdgeMask& mask);

}  // namespace deblur
