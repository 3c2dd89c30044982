#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "deblur/edge_taper.hpp"
#include "deblur/error.hpp"
#include "deblur/fft.hpp"
#include "deblur/filters.hpp"
#include "deblur/image_io.hpp"
#include "deblur/resample.hpp"
#include "helpers.hpp"

using namespace deblur;
using testutil::random_image;
using testutil::random_kernel;

namespace {

Image loop_conv_periodic(const Image& img, const Kernel& k) {
    const int w = img.width(), h = img.height(), r = k.radius();
    Image out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int v = -r; v <= r; ++v)
                for (int u = -r; u <= r; ++u)
                    acc += k(u + r, v + r) * img(testutil::wrap(x - u, w), testutil::wrap(y - v, h));
            out(x, y) = acc;
        }
    return out;
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "deblur_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_SUITE("imgcore") {

TEST_CASE("image layout and gray conversion") {
    Image rgb(4, 3, 3, 0.0);
    CHECK(rgb.size() == 36);
    rgb(1, 2, 0) = 1.0;
    rgb(1, 2, 1) = 0.5;
    rgb(1, 2, 2) = 0.25;
    const Image g = to_gray(rgb);
    CHECK(g.channels() == 1);
    CHECK(g(1, 2) == doctest::Approx(0.299 + 0.587 * 0.5 + 0.114 * 0.25).epsilon(1e-14));
    CHECK(rgb.wrapped(-1, -1, 0) == rgb(3, 2, 0));
    CHECK(rgb.clamped(9, 9, 0) == rgb(3, 2, 0));
}

TEST_CASE("conv2 with a delta kernel is the identity") {
    const Image img = random_image(12, 9, 1);
    for (auto b : {Boundary::Periodic, Boundary::Replicate}) {
        CHECK(max_abs_difference(conv2(img, Kernel::delta(1), b), img) == 0.0);
        CHECK(max_abs_difference(conv2(img, Kernel::delta(5), b), img) == 0.0);
    }
}

TEST_CASE("conv2 preserves constants") {
    const Image img(20, 17, 1, 0.37);
    const Kernel k = random_kernel(7, 2);
    for (auto b : {Boundary::Periodic, Boundary::Replicate}) {
        const Image out = conv2(img, k, b);
        for (double v : out.data()) CHECK(v == doctest::Approx(0.37).epsilon(1e-13));
    }
}

TEST_CASE("conv2 periodic matches a direct loop") {
    const Image img = random_image(16, 16, 3);
    const Kernel k = random_kernel(3, 4);
    CHECK(max_abs_difference(conv2(img, k, Boundary::Periodic), loop_conv_periodic(img, k)) <= 1e-12);
}

TEST_CASE("conv2 periodic matches the FFT path") {
    for (int ks : {3, 9, 21}) {
        const Image img = random_image(32, 32, 10 + ks);
        const Kernel k = random_kernel(ks, 20 + ks);
        CHECK(max_abs_difference(conv2(img, k, Boundary::Periodic), conv2_fft(img, k)) <= 1e-10);
        CHECK(max_abs_difference(loop_conv_periodic(img, k), conv2_fft(img, k)) <= 1e-10);
    }
}

TEST_CASE("correlate is the adjoint of conv2") {
    for (unsigned s = 0; s < 5; ++s) {
        const Image x = random_image(19, 23, 100 + s, -1.0, 1.0);
        const Image y = random_image(19, 23, 200 + s, -1.0, 1.0);
        const Kernel k = random_kernel(5, 300 + s);
        const double lhs = dot(conv2(x, k, Boundary::Periodic), y);
        const double rhs = dot(x, correlate(y, k, Boundary::Periodic));
        CHECK(std::abs(lhs - rhs) <= 1e-10);
    }
}

TEST_CASE("conv2 is linear") {
    const Image a = random_image(15, 15, 5), b = random_image(15, 15, 6);
    const Kernel k = random_kernel(5, 7);
    Image sum = a;
    for (std::size_t i = 0; i < sum.size(); ++i) sum.data()[i] = 2.0 * a.data()[i] - 3.0 * b.data()[i];
    const Image ca = conv2(a, k, Boundary::Replicate), cb = conv2(b, k, Boundary::Replicate);
    const Image cs = conv2(sum, k, Boundary::Replicate);
    for (std::size_t i = 0; i < cs.size(); ++i) CHECK(cs.data()[i] == doctest::Approx(2.0 * ca.data()[i] - 3.0 * cb.data()[i]).epsilon(1e-12));
}

TEST_CASE("kernel larger than the image is rejected") {
    const Image img(6, 6);
    CHECK_THROWS_AS(conv2(img, Kernel::delta(7), Boundary::Periodic), Error);
    try {
        conv2_fft(img, Kernel::delta(9));
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Dimension);
    }
}

TEST_CASE("gradients of constants and ramps") {
    const GradientPair c = gradients(Image(9, 7, 1, 0.4));
    for (double v : c.gx.data()) CHECK(v == 0.0);
    for (double v : c.gy.data()) CHECK(v == 0.0);

    const int w = 16;
    Image ramp(w, 10);
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < w; ++x) ramp(x, y) = static_cast<double>(x) / w;
    const GradientPair g = gradients(ramp);
    for (int y = 0; y < 10; ++y) {
        for (int x = 0; x + 1 < w; ++x) CHECK(g.gx(x, y) == doctest::Approx(1.0 / w).epsilon(1e-14));
        for (int x = 0; x < w; ++x) CHECK(g.gy(x, y) == 0.0);
    }
}

TEST_CASE("gradients match index differences exactly") {
    const Image img = random_image(8, 8, 11);
    const GradientPair g = gradients(img);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            CHECK(g.gx(x, y) == img((x + 1) % 8, y) - img(x, y));
            CHECK(g.gy(x, y) == img(x, (y + 1) % 8) - img(x, y));
        }
}

TEST_CASE("gradients_adjoint is the transpose") {
    const Image x = random_image(11, 13, 12, -1, 1);
    const GradientPair p{random_image(11, 13, 13, -1, 1), random_image(11, 13, 14, -1, 1)};
    const GradientPair gx = gradients(x);
    const double lhs = dot(gx.gx, p.gx) + dot(gx.gy, p.gy);
    CHECK(std::abs(lhs - dot(x, gradients_adjoint(p))) <= 1e-11);
}

TEST_CASE("gradients reject colour input") {
    try {
        gradients(Image(4, 4, 3));
        FAIL("expected a channel error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Channel);
    }
}

TEST_CASE("fft round trip and otf of the difference operator") {
    const Image img = random_image(10, 7, 15);
    CHECK(max_abs_difference(ifft2(fft2(img)), img) <= 1e-13);
    const Spectrum dx = dx_otf(10, 7);
    Spectrum s = fft2(img);
    for (std::size_t i = 0; i < s.bins.size(); ++i) s.bins[i] *= dx.bins[i];
    CHECK(max_abs_difference(ifft2(s), gradients(img).gx) <= 1e-13);
}

TEST_CASE("downscale dimensions and constants") {
    const Image big(256, 256, 1, 0.6);
    const Image small = downscale(big, 4.0 / 3.0);
    CHECK(small.width() == 192);
    CHECK(small.height() == 192);
    for (double v : small.data()) CHECK(v == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(downscale(Image(100, 40, 1), 2.0).height() == 20);
}

TEST_CASE("downscale preserves the mean") {
    const Image img = random_image(97, 83, 16);
    const Image out = downscale(img, 4.0 / 3.0);
    CHECK(std::abs(out.mean() - img.mean()) <= 1e-3);
}

TEST_CASE("downscale keeps a low-frequency sinusoid") {
    const double a = 4.0 / 3.0;
    const double f = 1.0 / (8.0 * a);  // a quarter of the output Nyquist rate, cycles per input pixel
    const int n = 256;
    Image img(n, 32);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < n; ++x) img(x, y) = 0.5 + 0.25 * std::sin(2.0 * M_PI * f * x);
    const Image out = downscale(img, a);
    // least-squares amplitude over interior samples at the known output positions
    double ss = 0, sc = 0, s2 = 0, c2 = 0, sc2 = 0;
    const int m = out.width();
    const double ratio = static_cast<double>(n) / m;
    for (int i = 8; i < m - 8; ++i) {
        const double pos = (i + 0.5) * ratio - 0.5;
        const double sv = std::sin(2.0 * M_PI * f * pos), cv = std::cos(2.0 * M_PI * f * pos);
        const double val = out(i, 16) - 0.5;
        ss += val * sv;
        sc += val * cv;
        s2 += sv * sv;
        c2 += cv * cv;
        sc2 += sv * cv;
    }
    const double det = s2 * c2 - sc2 * sc2;
    const double as = (ss * c2 - sc * sc2) / det, ac = (sc * s2 - ss * sc2) / det;
    CHECK(std::abs(std::hypot(as, ac) - 0.25) <= 0.02 * 0.25);
}

TEST_CASE("downscale below the minimum side throws") {
    try {
        downscale(Image(10, 10), 2.0);
        FAIL("expected a scale error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Scale);
    }
}

TEST_CASE("pyramid depth") {
    CHECK(pyramid_depth(3, 5, 4.0 / 3.0) == 1);
    CHECK(pyramid_depth(51, 5, 4.0 / 3.0) == 10);
    CHECK(pyramid_depth(13, 5, 4.0 / 3.0) == 5);
    const double a = 4.0 / 3.0;
    for (int ks = 1; ks <= 151; ks += 2)
        for (int p : {3, 5, 7}) {
            const int L = pyramid_depth(ks, p, a);
            CHECK(L >= 1);
            CHECK(ks / std::pow(a, L - 1) < p);
            if (L > 1) CHECK(ks / std::pow(a, L - 2) >= p);
        }
}

TEST_CASE("pyramid levels") {
    const Image y = random_image(200, 150, 17);
    const Pyramid p = build_pyramid(y, 13, 5, 4.0 / 3.0);
    REQUIRE(p.depth() == 5);
    CHECK(max_abs_difference(p.levels.back().image, y) == 0.0);
    CHECK(p.levels.back().scale == 1.0);
    for (int l = 0; l + 1 < p.depth(); ++l) {
        CHECK(p.levels[l + 1].scale / p.levels[l].scale == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
        const double expect = std::pow(4.0 / 3.0, p.depth() - 1 - l);
        CHECK(p.levels[l].image.width() == static_cast<int>(std::lround(200 / expect)));
    }
}

TEST_CASE("edge_taper identities") {
    const Image img = random_image(40, 36, 18);
    CHECK(max_abs_difference(edge_taper(img, Kernel::delta(1)), img) == 0.0);
    CHECK(max_abs_difference(edge_taper(img, Kernel::delta(7)), img) <= 1e-12);

    const Kernel k = random_kernel(7, 19);
    const Image t = edge_taper(img, k);
    for (int y = 7; y < 36 - 7; ++y)
        for (int x = 7; x < 40 - 7; ++x) CHECK(std::abs(t(x, y) - img(x, y)) <= 1e-12);

    const Image c = edge_taper(Image(30, 30, 1, 0.25), k);
    for (double v : c.data()) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("edge_taper moves the border toward the blurred image") {
    const Image img = random_image(40, 40, 20);
    const Kernel k = random_kernel(9, 21);
    const Image t = edge_taper(img, k), b = conv2_fft(img, k);
    CHECK(std::abs(t(0, 20) - b(0, 20)) < std::abs(img(0, 20) - b(0, 20)) + 1e-15);
    CHECK(t.all_finite());
}

TEST_CASE("png and pgm round trips") {
    const Image img = random_image(13, 9, 22);
    write_image(scratch("a16.png"), img, 16);
    const Image r16 = read_image(scratch("a16.png"));
    CHECK(max_abs_difference(r16, img) <= 0.5 / 65535.0 + 1e-12);
    write_image(scratch("a8.pgm"), img, 8);
    const Image r8 = read_image(scratch("a8.pgm"));
    CHECK(max_abs_difference(r8, img) <= 0.5 / 255.0 + 1e-12);

    const Image rgb = random_image(5, 6, 23, 0, 1, 3);
    write_image(scratch("c.png"), rgb, 8);
    CHECK(read_image(scratch("c.png")).channels() == 3);
    write_image(scratch("c16.ppm"), rgb, 16);
    CHECK(max_abs_difference(read_image(scratch("c16.ppm")), rgb) <= 0.5 / 65535.0 + 1e-12);
}

TEST_CASE("unreadable images raise Io") {
    try {
        read_image(scratch("does_not_exist.png"));
        FAIL("expected an io error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Io);
    }
}

TEST_CASE("kernel projection") {
    Kernel k(5);
    k(2, 2) = 2.0;
    k(1, 2) = -0.5;
    k(3, 2) = 0.09;  // below 5% of the max
    k(2, 1) = 0.5;
    const Kernel p = project_kernel(k);
    CHECK(p.is_normalized(1e-10));
    CHECK(p(1, 2) == 0.0);
    CHECK(p(3, 2) == 0.0);
    CHECK(p(2, 2) == doctest::Approx(0.8));
    for (double v : p.weights()) CHECK(v >= 0.0);
    CHECK_THROWS_AS(project_kernel(Kernel(3, -1.0)), Error);

    CHECK(Kernel::delta(5).is_delta());
    CHECK(Kernel::box(2).size() == 3);
    CHECK(Kernel::box(3).sum() == doctest::Approx(1.0));
    const Kernel r = random_kernel(5, 24);
    CHECK(normalized_correlation(r, r) == doctest::Approx(1.0));
    CHECK(normalized_correlation(r, r.resized(9)) == doctest::Approx(1.0));
    CHECK(round_up_to_odd(4.2) == 5);
    CHECK(round_up_to_odd(5.0) == 5);
}

TEST_CASE("subpixel centering") {
    CHECK(Kernel::delta(5).subpixel_centered().weights()[12] == 1.0);
    Kernel k(5);
    k(2, 2) = 0.5;
    k(3, 2) = 0.5;
    const Kernel c = k.subpixel_centered();
    double mx = 0.0, my = 0.0;
    for (int v = 0; v < 5; ++v)
        for (int u = 0; u < 5; ++u) {
            mx += c(u, v) * (u - 2);
            my += c(u, v) * (v - 2);
        }
    CHECK(std::abs(mx) <= 1e-12);
    CHECK(std::abs(my) <= 1e-12);
    CHECK(c.sum() == doctest::Approx(1.0));
    for (unsigned s = 0; s < 5; ++s) {
        const Kernel r = testutil::random_kernel(5, 40 + s).resized(7).subpixel_centered();
        double ex = 0.0, ey = 0.0;
        for (int v = 0; v < 7; ++v)
            for (int u = 0; u < 7; ++u) {
                ex += r(u, v) * (u - 3);
                ey += r(u, v) * (v - 3);
            }
        CHECK(std::abs(ex / r.sum()) <= 1e-9);
        CHECK(std::abs(ey / r.sum()) <= 1e-9);
    }
}

TEST_CASE("weak kernel components are dropped") {
    Kernel k(7);
    k(1, 1) = 0.5;
    k(2, 1) = 0.4;
    k(5, 5) = 0.05;
    k(6, 0) = 0.05;
    const Kernel d = drop_weak_components(k, 0.1);
    CHECK(d(5, 5) == 0.0);
    CHECK(d(6, 0) == 0.0);
    CHECK(d(1, 1) == doctest::Approx(0.5 / 0.9));
    CHECK(d.is_normalized());
    const Kernel keep = drop_weak_components(k, 0.01);
    CHECK(keep(5, 5) > 0.0);
    CHECK(drop_weak_components(Kernel::delta(3), 0.5).is_delta());
}

TEST_CASE("a support threshold cuts faint bridges between components") {
    Kernel k(7);
    k(1, 3) = 0.6;
    k(2, 3) = 0.02;
    k(3, 3) = 0.02;
    k(4, 3) = 0.02;
    k(5, 3) = 0.04;
    const Kernel joined = drop_weak_components(k, 0.1);
    CHECK(joined(5, 3) > 0.0);
    const Kernel split = drop_weak_components(k, 0.1, 0.05);
    CHECK(split(1, 3) == 1.0);
    CHECK(split.sum() == doctest::Approx(1.0));
    const Kernel kept = drop_weak_components(k, 0.01, 0.05);
    CHECK(kept(5, 3) == doctest::Approx(0.04 / 0.64));
    CHECK(kept(3, 3) == 0.0);
}

}  // TEST_SUITE
