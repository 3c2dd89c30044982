#pragma once

#include <functional>

#include <Eigen/Dense>

namespace deblur {

using LinearOperator = std::function<void(const Eigen::VectorXd& in, Eigen::VectorXd& out)>;

struct BicgOptions {
    double tolerance = 1e-4;  // on |b - Ax| / |b|
    int max_iterations = 60;
};

struct BicgResult {
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

// Biconjugate gradient for A x = b, starting from the value held in x. On
// exit x holds the iterate with the smallest residual seen.
BicgResult bicg(const LinearOperator& apply, const LinearOperator& apply_transpose, const Eigen::VectorXd& b,
                Eigen::VectorXd& x, const BicgOptions& options);

}  // namespace deblur
