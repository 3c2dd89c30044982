#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "deblur/cross_scale.hpp"
#include "deblur/error.hpp"
#include "deblur/evaluation.hpp"
#include "deblur/filters.hpp"
#include "deblur/image_io.hpp"
#include "deblur/log.hpp"
#include "deblur/resample.hpp"
#include "helpers.hpp"

using namespace deblur;
using namespace testutil;

TEST_SUITE("evalprobe") {

TEST_CASE("error ratio trivial cases") {
    const Image x = random_image(20, 20, 1);
    const Image a = random_image(20, 20, 2);
    CHECK(error_ratio(x, a, a) == doctest::Approx(1.0));
    CHECK(error_ratio(x, x, a) == 0.0);
}

TEST_CASE("error ratio matches the quotient") {
    for (unsigned s = 0; s < 10; ++s) {
        const Image x = random_image(17, 13, 10 + s), a = random_image(17, 13, 30 + s), b = random_image(17, 13, 50 + s);
        double num = 0, den = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            num += std::pow(x.data()[i] - a.data()[i], 2);
            den += std::pow(x.data()[i] - b.data()[i], 2);
        }
        CHECK(error_ratio(x, a, b) == doctest::Approx(num / den).epsilon(1e-12));
        CHECK(error_ratio(x, a, b) >= 0.0);
    }
}

TEST_CASE("error ratio with a perfect reference") {
    const Image x = random_image(8, 8, 3);
    log::take_warnings();
    CHECK(std::isinf(error_ratio(x, random_image(8, 8, 4), x)));
    CHECK_FALSE(log::take_warnings().empty());
    CHECK_THROWS_AS(error_ratio(x, Image(9, 8), x), Error);
}

TEST_CASE("aggregation") {
    const ErrorRatioReport a = aggregate({1, 1, 1}, 3.0);
    CHECK(a.success_rate == 1.0);
    CHECK(a.mean == 1.0);
    const ErrorRatioReport b = aggregate({2, 4}, 3.0);
    CHECK(b.success_rate == 0.5);
    CHECK(b.mean == 3.0);
    const ErrorRatioReport c = aggregate({5.0, 1.2, 3.0, 2.5, 7.0}, 3.0);
    CHECK(c.success_rate == doctest::Approx(0.6));
    REQUIRE(c.cumulative.size() == 5);
    for (std::size_t i = 1; i < c.cumulative.size(); ++i) {
        CHECK(c.cumulative[i].first >= c.cumulative[i - 1].first);
        CHECK(c.cumulative[i].second >= c.cumulative[i - 1].second);
    }
    CHECK(c.cumulative.back().second == 1.0);
    CHECK(aggregate({4.9}, 5.0).success_rate == 1.0);
}

TEST_CASE("report serialization") {
    const ErrorRatioReport r = aggregate({1.5, 2.5}, 3.0);
    const auto j = to_json(r);
    CHECK(j["schema_version"] == 1);
    CHECK(j["success_rate"].get<double>() == 1.0);
    std::ostringstream csv;
    write_csv(csv, r);
    CHECK(csv.str().find("1.5") != std::string::npos);
}

TEST_CASE("delta blur makes both sets all-true") {
    const Image sharp = smooth_image(32, 32, 5);
    EstimationConfig cfg;
    cfg.atoms = 20;
    const ProbeReport r = probe_regularizers(sharp, {Kernel::delta(1)}, cfg);
    REQUIRE(r.variants.size() == 2);
    for (const auto& c : all_patch_centers(32, 32, 5)) {
        CHECK(r.variants[1].r_c(c.x, c.y));
        CHECK(r.variants[1].r_s(c.x, c.y));
    }
    CHECK(r.variants[1].r_c_overall == 1.0);
}

TEST_CASE("toy memberships match a brute-force recomputation") {
    const Image sharp = random_image(16, 16, 6);
    EstimationConfig cfg;
    cfg.atoms = 30;
    cfg.search = SearchMode::Exact;
    ProbeOptions opts;
    const Kernel box = Kernel::box(2);
    const ProbeReport r = probe_regularizers(sharp, {box}, cfg, opts);
    const Image blurred = conv2(sharp, box, Boundary::Replicate);
    const Dictionary dict = probe_dictionary(blurred, cfg);

    const auto errors = [&](const Image& img, PatchIndex c, double& sparse, double& nonlocal) {
        Eigen::VectorXd q(25);
        extract_patch(img, 5, c, q);
        sparse = (q - reconstruct(dict, omp_encode(dict, q, cfg.sparsity))).squaredNorm();
        const Image coarse = downscale(img, cfg.a);
        std::vector<std::pair<double, PatchIndex>> scan;
        for (const auto& t : all_patch_centers(coarse.width(), coarse.height(), 5)) {
            Eigen::VectorXd p(25);
            extract_patch(coarse, 5, t, p);
            scan.push_back({(q - p).squaredNorm(), t});
        }
        std::stable_sort(scan.begin(), scan.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<double> w(5);
        double total = 0.0;
        for (int i = 0; i < 5; ++i) total += (w[i] = std::exp(-(scan[i].first - scan[0].first) / cfg.h_w));
        Eigen::VectorXd pred = Eigen::VectorXd::Zero(25);
        for (int i = 0; i < 5; ++i) {
            Eigen::VectorXd p(25);
            extract_patch(coarse, 5, scan[i].second, p);
            pred += w[i] / total * p;
        }
        nonlocal = (q - pred).squaredNorm();
    };

    double sum_c = 0.0, sum_s = 0.0;
    const auto centers = all_patch_centers(16, 16, 5);
    CHECK(r.patches == centers.size());
    for (const auto& c : centers) {
        double sc, ss, bc, bs;
        errors(sharp, c, sc, ss);
        errors(blurred, c, bc, bs);
        sum_c += bc;
        sum_s += bs;
        CHECK(r.variants[1].r_c(c.x, c.y) == (sc <= bc));
        CHECK(r.variants[1].r_s(c.x, c.y) == (ss <= bs));
    }
    CHECK(r.variants[1].sparse_rms == doctest::Approx(std::sqrt(sum_c / (centers.size() * 25.0))).epsilon(1e-9));
    CHECK(r.variants[1].nonlocal_rms == doctest::Approx(std::sqrt(sum_s / (centers.size() * 25.0))).epsilon(1e-9));
    CHECK(r.variants[1].label == "2x2");
}

TEST_CASE("probe rows decrease with blur size on a natural image") {
    const Image sharp = downscale(to_gray(read_image(std::filesystem::path(DEBLUR_TEST_DATA) / "camera.png")), 2.0);
    EstimationConfig cfg;
    const ProbeReport r = probe_regularizers(sharp, {Kernel::box(2), Kernel::box(3), Kernel::box(5)}, cfg);
    REQUIRE(r.variants.size() == 4);
    for (std::size_t i = 1; i < 4; ++i) {
        CHECK(r.variants[i].sparse_rms < r.variants[i - 1].sparse_rms);
        CHECK(r.variants[i].nonlocal_rms < r.variants[i - 1].nonlocal_rms);
    }
    for (const auto& v : r.variants) {
        CHECK(v.sparse_rms >= 0.0);
        CHECK(v.nonlocal_rms >= 0.0);
    }
    const auto j = to_json(r);
    CHECK(j["variants"].size() == 4);
}

}  // TEST_SUITE
