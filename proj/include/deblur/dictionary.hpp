#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "deblur/patches.hpp"

namespace deblur {

// n x t matrix of unit-norm atoms.
struct Dictionary {
    Eigen::MatrixXd atoms;

    int n() const noexcept { return static_cast<int>(atoms.rows()); }
    int t() const noexcept { return static_cast<int>(atoms.cols()); }
};

struct SparseCode {
    std::vector<int> support;          // selection order
    std::vector<double> coeffs;        // aligned with support
    std::vector<double> residual_norms;  // |r| before the first pick and after each pick
    double residual_norm() const { return residual_norms.empty() ? 0.0 : residual_norms.back(); }
};

// Greedy orthogonal matching pursuit: pick the atom with the largest
// |<d_k, r>| (lowest index on ties), refit all coefficients on the support by
// least squares, stop after `sparsity` atoms or once |r| < 1e-12.
SparseCode omp_encode(const Dictionary& dict, const Eigen::Ref<const Eigen::VectorXd>& patch, int sparsity);

Eigen::VectorXd reconstruct(const Dictionary& dict, const SparseCode& code);

struct KsvdResult {
    Dictionary dictionary;
    // Sum of squared reconstruction errors after the initial coding pass and
    // after every sweep.
    std::vector<double> objective;
};

// K-SVD over the columns of `samples`. Deterministic for a given seed.
KsvdResult ksvd_train(const PatchMatrix& samples, int atoms, int sparsity, int iterations, std::uint64_t seed);

// Text format: "n t" header line, then one atom per line.
void write_dictionary(std::ostream& out, const Dictionary& dict);
Dictionary read_dictionary(std::istream& in);
void save_dictionary(const std::filesystem::path& path, const Dictionary& dict);
Dictionary load_dictionary(const std::filesystem::path& path);

}  // namespace deblur
