#include "deblur/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "deblur/error.hpp"

namespace deblur {

Kernel motion_kernel(int size, std::uint64_t seed) {
    if (size < 3 || size % 2 == 0) throw Error(ErrorKind::Parameter, "motion kernel size must be odd and at least 3");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);

    const int steps = 4 * size;
    std::vector<double> px, py;
    double x = 0, y = 0;
    double heading = uniform(rng);
    double turn = 0.0;
    for (int i = 0; i < steps; ++i) {
        turn = 0.9 * turn + 0.06 * gauss(rng);
        heading += turn;
        x += std::cos(heading);
        y += std::sin(heading);
        px.push_back(x);
        py.push_back(y);
    }
    double cx = 0, cy = 0;
    for (std::size_t i = 0; i < px.size(); ++i) {
        cx += px[i];
        cy += py[i];
    }
    cx /= static_cast<double>(px.size());
    cy /= static_cast<double>(py.size());
    double reach = 1e-9;
    for (std::size_t i = 0; i < px.size(); ++i) reach = std::max({reach, std::abs(px[i] - cx), std::abs(py[i] - cy)});
    // Farthest sample lands one pixel inside the border.
    const double scale = (size / 2 - 1) / reach;
    for (std::size_t i = 0; i < px.size(); ++i) {
        px[i] = (px[i] - cx) * scale;
        py[i] = (py[i] - cy) * scale;
    }

    Kernel k(size);
    const int r = k.radius();
    for (std::size_t i = 0; i < px.size(); ++i) {
        const double fx = px[i] + r, fy = py[i] + r;
        const int x0 = static_cast<int>(std::floor(fx)), y0 = static_cast<int>(std::floor(fy));
        const double ax = fx - x0, ay = fy - y0;
        const int xs[2] = {x0, x0 + 1}, ys[2] = {y0, y0 + 1};
        const double wx[2] = {1 - ax, ax}, wy[2] = {1 - ay, ay};
        for (int b = 0; b < 2; ++b)
            for (int a = 0; a < 2; ++a)
                if (xs[a] >= 0 && xs[a] < size && ys[b] >= 0 && ys[b] < size) k(xs[a], ys[b]) += wx[a] * wy[b];
    }
    const double sum = k.sum();
    for (double& w : k.weights()) w /= sum;
    return k;
}

Image synthesize_blur(const Image& sharp, const Kernel& kernel, double noise_percent, std::uint64_t seed,
                      Boundary boundary) {
    if (noise_percent < 0) throw Error(ErrorKind::Parameter, "noise level must be non-negative");
    Image y = conv2(sharp, kernel, boundary);
    if (noise_percent > 0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, noise_percent / 100.0);
        for (double& v : y.data()) v += gauss(rng);
    }
    return y;
}

}  // namespace deblur
