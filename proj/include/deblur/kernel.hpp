#pragma once

#include <span>
#include <vector>

namespace deblur {

// Square blur kernel (PSF) with an odd side so there is a center tap.
// Tap (u, v) sits at offset (u - radius, v - radius) from the center.
class Kernel {
public:
    Kernel() = default;
    explicit Kernel(int size, double fill = 0.0);
    Kernel(int size, std::vector<double> weights);

    static Kernel delta(int size = 1);
    // n x n averaging box; even n is placed at the upper-left of an (n+1)-sized grid.
    static Kernel box(int n);

    int size() const noexcept { return size_; }
    int radius() const noexcept { return size_ / 2; }

    double& operator()(int u, int v) noexcept { return weights_[static_cast<std::size_t>(v) * size_ + u]; }
    double operator()(int u, int v) const noexcept { return weights_[static_cast<std::size_t>(v) * size_ + u]; }
    // Value at signed offset from the center; zero outside the support.
    double at_offset(int dx, int dy) const noexcept;

    std::span<double> weights() noexcept { return weights_; }
    std::span<const double> weights() const noexcept { return weights_; }

    double sum() const;
    double max() const;
    double norm() const;
    bool is_normalized(double tol = 1e-10) const;
    bool is_delta() const;

    // Zero-pads or center-crops to a new odd size.
    Kernel resized(int new_size) const;
    // Integer shift that moves the center of mass onto the center tap.
    Kernel centered() const;
    // Bilinear resampling that puts the center of mass exactly on the center tap.
    Kernel subpixel_centered() const;

private:
    int size_ = 0;
    std::vector<double> weights_;
};

// Physical PSF projection: negatives to zero, taps below `floor_fraction` of
// the maximum to zero, then renormalize to unit sum. Throws DegenerateGradient
// when nothing survives.
Kernel project_kernel(Kernel k, double floor_fraction = 0.05);

// Zeroes taps below `support` times the peak and then every 8-connected
// component whose mass is below `fraction` of the heaviest one; renormalizes.
Kernel drop_weak_components(const Kernel& k, double fraction, double support = 0.0);

// <a, b> / (|a| |b|) after padding both to a common size.
double normalized_correlation(const Kernel& a, const Kernel& b);

int round_up_to_odd(double v);

}  // namespace deblur
