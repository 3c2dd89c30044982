#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "deblur/error.hpp"
#include "deblur/filters.hpp"
#include "deblur/image_io.hpp"
#include "deblur/restore.hpp"
#include "helpers.hpp"

using namespace deblur;
using namespace testutil;

namespace {

Kernel well_conditioned(int size, unsigned seed) {
    Kernel k = random_kernel(size, seed);
    for (double& v : k.weights()) v *= 0.4;
    k(k.radius(), k.radius()) += 0.6;
    return k;
}

double psnr(const Image& a, const Image& b) {
    return 10.0 * std::log10(static_cast<double>(a.size()) / squared_distance(a, b));
}

}  // namespace

TEST_SUITE("restore") {

TEST_CASE("method names") {
    for (auto m : {RestoreMethod::Wiener, RestoreMethod::HyperLaplacian, RestoreMethod::TvL1})
        CHECK(parse_restore_method(to_string(m)) == m);
    CHECK(parse_restore_method("tv_l1") == RestoreMethod::TvL1);
    CHECK_THROWS_AS(parse_restore_method("richardson"), Error);
}

TEST_CASE("a delta kernel returns the input") {
    const Image y = random_image(30, 20, 1);
    for (auto m : {RestoreMethod::Wiener, RestoreMethod::HyperLaplacian, RestoreMethod::TvL1}) {
        RestoreConfig cfg;
        cfg.method = m;
        CHECK(max_abs_difference(deconvolve(y, Kernel::delta(1), cfg), y) <= 1e-6);
        CHECK(max_abs_difference(deconvolve(y, Kernel::delta(5), cfg), y) <= 1e-6);
    }
}

TEST_CASE("wiener inverts a noiseless periodic blur") {
    const Image x = random_image(32, 32, 2, 0.1, 0.9);
    const Kernel k = well_conditioned(5, 3);
    const Image y = conv2(x, k, Boundary::Periodic);
    RestoreConfig cfg;
    cfg.method = RestoreMethod::Wiener;
    cfg.weight = 1e-8;
    cfg.taper = false;
    CHECK(max_abs_difference(deconvolve(y, k, cfg), x) <= 1e-4);
}

TEST_CASE("wiener equals the dense regularized least squares solution") {
    const int w = 12, h = 12;
    const Image y = smooth_image(w, h, 4);
    const Kernel k = random_kernel(3, 5);
    const double weight = 0.01;
    const Eigen::MatrixXd H = conv_matrix(k, w, h), Dx = dx_matrix(w, h), Dy = dy_matrix(w, h);
    const Eigen::MatrixXd A = H.transpose() * H + weight * (Dx.transpose() * Dx + Dy.transpose() * Dy);
    Eigen::VectorXd x = A.ldlt().solve(H.transpose() * to_vec(y));
    x = x.cwiseMax(0.0).cwiseMin(1.0);
    RestoreConfig cfg;
    cfg.method = RestoreMethod::Wiener;
    cfg.weight = weight;
    cfg.taper = false;
    CHECK((to_vec(deconvolve(y, k, cfg)) - x).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("colour channels are restored independently") {
    const Image rgb = random_image(24, 24, 6, 0, 1, 3);
    const Kernel k = random_kernel(5, 7);
    for (auto m : {RestoreMethod::Wiener, RestoreMethod::HyperLaplacian, RestoreMethod::TvL1}) {
        RestoreConfig cfg;
        cfg.method = m;
        cfg.iterations = 5;
        const Image out = deconvolve(rgb, k, cfg);
        REQUIRE(out.channels() == 3);
        for (int c = 0; c < 3; ++c) CHECK(max_abs_difference(out.channel(c), deconvolve(rgb.channel(c), k, cfg)) == 0.0);
    }
}

TEST_CASE("splitting energy does not increase at fixed beta") {
    const Image x = smooth_image(40, 40, 8);
    const Kernel k = random_kernel(7, 9);
    Image y = conv2(x, k, Boundary::Periodic);
    const Image n = random_image(40, 40, 10, -0.01, 0.01);
    for (std::size_t i = 0; i < y.size(); ++i) y.data()[i] += n.data()[i];
    for (auto m : {RestoreMethod::HyperLaplacian, RestoreMethod::TvL1}) {
        RestoreConfig cfg;
        cfg.method = m;
        cfg.iterations = 15;
        cfg.beta_min = cfg.beta_max = 16.0;
        RestoreTrace trace;
        deconvolve(y, k, cfg, &trace);
        REQUIRE(trace.energy.size() == 15);
        for (std::size_t i = 1; i < trace.energy.size(); ++i)
            CHECK(trace.energy[i] <= trace.energy[i - 1] * (1.0 + 1e-10));
    }
}

TEST_CASE("hyper-Laplacian shrinkage is the global minimizer") {
    for (double alpha : {2.0 / 3.0, 0.5, 1.0})
        for (double beta : {1.0, 8.0, 256.0})
            for (double g : {-1.3, -0.2, -0.01, 0.0, 0.003, 0.05, 0.4, 2.0}) {
                const double v = shrink_hyper_laplacian(g, beta, alpha);
                const auto f = [&](double t) { return std::pow(std::abs(t), alpha) + beta / 2.0 * (t - g) * (t - g); };
                double best = f(0.0);
                for (int i = -40000; i <= 40000; ++i) best = std::min(best, f(g * 1.5 * i / 40000.0));
                CHECK(f(v) <= best + 1e-9);
                CHECK(std::abs(v) <= std::abs(g) + 1e-15);
            }
}

TEST_CASE("outputs are finite and in range") {
    const Image y = random_image(33, 29, 11);
    for (auto m : {RestoreMethod::Wiener, RestoreMethod::HyperLaplacian, RestoreMethod::TvL1}) {
        RestoreConfig cfg;
        cfg.method = m;
        const Image out = deconvolve(y, random_kernel(9, 12), cfg);
        CHECK(out.all_finite());
        CHECK(out.min() >= 0.0);
        CHECK(out.max() <= 1.0);
    }
}

TEST_CASE("restoration with the true kernel beats the blurry input") {
    const Image x = to_gray(read_image(std::filesystem::path(DEBLUR_TEST_DATA) / "camera.png"));
    Kernel k(9);
    for (int i = 0; i < 9; ++i) k(i, (i * 2) / 3 + 1) = 1.0;
    k = project_kernel(k, 0.0);
    const Image y = conv2(x, k, Boundary::Replicate);
    for (auto m : {RestoreMethod::Wiener, RestoreMethod::HyperLaplacian, RestoreMethod::TvL1}) {
        RestoreConfig cfg;
        cfg.method = m;
        CHECK(psnr(deconvolve(y, k, cfg), x) > psnr(y, x) + 3.0);
    }
}

TEST_CASE("invalid inputs") {
    const Image y = random_image(8, 8, 13);
    try {
        deconvolve(y, Kernel::delta(9));
        FAIL("expected a dimension error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Dimension);
    }
    try {
        deconvolve(y, Kernel(3, 0.5));
        FAIL("expected a parameter error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Parameter);
    }
    RestoreConfig cfg;
    cfg.weight = 0.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.iterations = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
}

}  // TEST_SUITE
