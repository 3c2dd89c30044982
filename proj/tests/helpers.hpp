#pragma once

#include <Eigen/Dense>
#include <random>

#include "deblur/image.hpp"
#include "deblur/kernel.hpp"

namespace testutil {

inline deblur::Image random_image(int w, int h, unsigned seed, double lo = 0.0, double hi = 1.0, int channels = 1) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    deblur::Image img(w, h, channels);
    for (double& v : img.data()) v = dist(rng);
    return img;
}

inline deblur::Kernel random_kernel(int size, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(0.05, 1.0);
    deblur::Kernel k(size);
    double s = 0.0;
    for (double& v : k.weights()) s += (v = dist(rng));
    for (double& v : k.weights()) v /= s;
    return k;
}

// Smooth random texture: a sum of a few low-frequency cosines plus an edge.
inline deblur::Image smooth_image(int w, int h, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
    deblur::Image img(w, h);
    const double p1 = phase(rng), p2 = phase(rng), p3 = phase(rng);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            img(x, y) = 0.5 + 0.2 * std::cos(6.283185307179586 * x / w + p1) +
                        0.15 * std::cos(6.283185307179586 * 2 * y / h + p2) +
                        0.1 * std::cos(6.283185307179586 * (x + y) / w + p3);
    return img;
}

inline int pix(int x, int y, int w) { return y * w + x; }
inline int wrap(int v, int n) { return ((v % n) + n) % n; }

inline Eigen::VectorXd to_vec(const deblur::Image& img) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(img.plane_size()));
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) v(pix(x, y, img.width())) = img(x, y);
    return v;
}

inline deblur::Image from_vec(const Eigen::VectorXd& v, int w, int h) {
    deblur::Image img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) img(x, y) = v(pix(x, y, w));
    return img;
}

// Dense periodic convolution matrix: (H x)(p) = sum_s k(s) x(p - s).
inline Eigen::MatrixXd conv_matrix(const deblur::Kernel& k, int w, int h) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(w * h, w * h);
    const int r = k.radius();
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int v = 0; v < k.size(); ++v)
                for (int u = 0; u < k.size(); ++u)
                    m(pix(x, y, w), pix(wrap(x - (u - r), w), wrap(y - (v - r), h), w)) += k(u, v);
    return m;
}

inline Eigen::MatrixXd dx_matrix(int w, int h) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(w * h, w * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            m(pix(x, y, w), pix(wrap(x + 1, w), y, w)) += 1.0;
            m(pix(x, y, w), pix(x, y, w)) -= 1.0;
        }
    return m;
}

inline Eigen::MatrixXd dy_matrix(int w, int h) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(w * h, w * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            m(pix(x, y, w), pix(x, wrap(y + 1, h), w)) += 1.0;
            m(pix(x, y, w), pix(x, y, w)) -= 1.0;
        }
    return m;
}

}  // namespace testutil
