#include <doctest.h>

#include <random>
#include <sstream>

#include "deblur/dictionary.hpp"
#include "deblur/error.hpp"

using namespace deblur;

namespace {

Dictionary random_dictionary(int n, int t, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g;
    Dictionary d{Eigen::MatrixXd(n, t)};
    for (int j = 0; j < t; ++j) {
        for (int i = 0; i < n; ++i) d.atoms(i, j) = g(rng);
        d.atoms.col(j).normalize();
    }
    return d;
}

double ls_residual(const Dictionary& d, const std::vector<int>& support, const Eigen::VectorXd& p) {
    Eigen::MatrixXd sub(d.n(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = d.atoms.col(support[k]);
    const Eigen::VectorXd c = sub.colPivHouseholderQr().solve(p);
    return (p - sub * c).norm();
}

}  // namespace

TEST_SUITE("sparsedict") {

TEST_CASE("omp on the standard basis recovers a 4-sparse vector") {
    Dictionary d{Eigen::MatrixXd::Identity(25, 25)};
    Eigen::VectorXd p = Eigen::VectorXd::Zero(25);
    p(3) = 0.5;
    p(7) = -1.0;
    p(12) = 0.25;
    p(20) = 2.0;
    const SparseCode c = omp_encode(d, p, 4);
    CHECK(c.support.size() == 4);
    CHECK(c.residual_norm() <= 1e-14);
    CHECK((reconstruct(d, c) - p).norm() <= 1e-14);
    CHECK(c.support.front() == 20);
}

TEST_CASE("omp with one atom picks the largest correlation") {
    const Dictionary d = random_dictionary(25, 100, 1);
    std::mt19937 rng(2);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd p(25);
        for (int i = 0; i < 25; ++i) p(i) = g(rng);
        Eigen::Index best = 0;
        (d.atoms.transpose() * p).cwiseAbs().maxCoeff(&best);
        const SparseCode c = omp_encode(d, p, 1);
        REQUIRE(c.support.size() == 1);
        CHECK(c.support[0] == best);
        CHECK(c.coeffs[0] == doctest::Approx(d.atoms.col(best).dot(p)).epsilon(1e-12));
    }
}

TEST_CASE("omp recovers a 3-sparse combination like exhaustive search") {
    const Dictionary d = random_dictionary(25, 100, 3);
    std::mt19937 rng(4);
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<int> truth;
        while (truth.size() < 3) {
            const int k = static_cast<int>(rng() % 100);
            if (std::find(truth.begin(), truth.end(), k) == truth.end()) truth.push_back(k);
        }
        Eigen::VectorXd p = Eigen::VectorXd::Zero(25);
        for (int k : truth) p += (1.0 + (rng() % 100) / 100.0) * d.atoms.col(k);

        // exhaustive oracle over all 3-subsets
        double best = 1e300;
        std::vector<int> best_set;
        for (int a = 0; a < 100; ++a)
            for (int b = a + 1; b < 100; ++b)
                for (int c = b + 1; c < 100; ++c) {
                    const double r = ls_residual(d, {a, b, c}, p);
                    if (r < best) {
                        best = r;
                        best_set = {a, b, c};
                    }
                }
        const SparseCode code = omp_encode(d, p, 3);
        std::vector<int> got = code.support;
        std::sort(got.begin(), got.end());
        std::sort(truth.begin(), truth.end());
        CHECK(got == best_set);
        CHECK(got == truth);
        CHECK(code.residual_norm() <= 1e-8);
    }
}

TEST_CASE("omp residuals and normal equations") {
    const Dictionary d = random_dictionary(25, 60, 5);
    std::mt19937 rng(6);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd p(25);
        for (int i = 0; i < 25; ++i) p(i) = g(rng);
        const SparseCode c = omp_encode(d, p, 4);
        CHECK(c.support.size() <= 4);
        for (std::size_t k = 1; k < c.residual_norms.size(); ++k) CHECK(c.residual_norms[k] <= c.residual_norms[k - 1]);
        std::vector<int> sorted = c.support;
        std::sort(sorted.begin(), sorted.end());
        CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
        const Eigen::VectorXd r = p - reconstruct(d, c);
        for (int k : c.support) CHECK(std::abs(d.atoms.col(k).dot(r)) <= 1e-10);
        const double single = std::sqrt(p.squaredNorm() - std::pow((d.atoms.transpose() * p).cwiseAbs().maxCoeff(), 2));
        CHECK(r.norm() <= single + 1e-12);
    }
}

TEST_CASE("omp of a zero patch is empty") {
    const Dictionary d = random_dictionary(9, 12, 7);
    const SparseCode c = omp_encode(d, Eigen::VectorXd::Zero(9), 4);
    CHECK(c.support.empty());
    CHECK(c.residual_norm() == 0.0);
}

TEST_CASE("ksvd on rank-one data") {
    Eigen::VectorXd v(9);
    v << 1, 2, 3, 4, 5, 4, 3, 2, 1;
    PatchMatrix s(9, 30);
    for (int j = 0; j < 30; ++j) s.col(j) = v;
    const KsvdResult r = ksvd_train(s, 1, 1, 5, 0);
    const Eigen::VectorXd a = r.dictionary.atoms.col(0);
    CHECK(std::abs(std::abs(a.dot(v.normalized())) - 1.0) <= 1e-12);
    CHECK(r.objective.back() <= 1e-20);
}

TEST_CASE("ksvd recovers an orthonormal generating dictionary") {
    const int n = 16;
    std::mt19937 rng(8);
    std::normal_distribution<double> g;
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n * n; ++i) m.data()[i] = g(rng);
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(m).householderQ();
    PatchMatrix s(n, 480);
    for (int j = 0; j < 480; ++j) s.col(j) = (0.5 + (rng() % 100) / 100.0) * (rng() % 2 ? 1 : -1) * q.col(j % n);
    const KsvdResult r = ksvd_train(s, n, 1, 30, 9);
    CHECK(r.objective.back() / 480.0 <= 1e-6);
}

TEST_CASE("ksvd objective, unit atoms and determinism") {
    std::mt19937 rng(10);
    std::normal_distribution<double> g;
    PatchMatrix s(25, 400);
    for (Eigen::Index i = 0; i < s.size(); ++i) s.data()[i] = g(rng);
    const KsvdResult a = ksvd_train(s, 40, 4, 8, 11);
    for (std::size_t k = 1; k < a.objective.size(); ++k) CHECK(a.objective[k] <= a.objective[k - 1] * (1 + 1e-12));
    for (int j = 0; j < a.dictionary.t(); ++j) CHECK(std::abs(a.dictionary.atoms.col(j).norm() - 1.0) <= 1e-10);
    const Eigen::MatrixXd gram = a.dictionary.atoms.transpose() * a.dictionary.atoms;
    for (int i = 0; i < 40; ++i)
        for (int j = i + 1; j < 40; ++j) CHECK(std::abs(gram(i, j)) < 1.0 - 1e-8);
    const KsvdResult b = ksvd_train(s, 40, 4, 8, 11);
    CHECK((a.dictionary.atoms - b.dictionary.atoms).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ksvd input errors") {
    try {
        ksvd_train(PatchMatrix::Ones(9, 5), 10, 2, 3, 0);
        FAIL("expected a training-data error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::TrainingData);
    }
    try {
        ksvd_train(PatchMatrix::Zero(9, 50), 10, 2, 3, 0);
        FAIL("expected a degenerate-data error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateData);
    }
}

TEST_CASE("dictionary text round trip") {
    const Dictionary d = random_dictionary(25, 7, 12);
    std::stringstream ss;
    write_dictionary(ss, d);
    const Dictionary r = read_dictionary(ss);
    REQUIRE(r.n() == 25);
    REQUIRE(r.t() == 7);
    CHECK((r.atoms - d.atoms).cwiseAbs().maxCoeff() <= 1e-15);
}

}  // TEST_SUITE
