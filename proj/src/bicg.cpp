#include "deblur/bicg.hpp"

#include <cmath>

#include "deblur/error.hpp"

namespace deblur {

BicgResult bicg(const LinearOperator& apply, const LinearOperator& apply_transpose, const Eigen::VectorXd& b,
                Eigen::VectorXd& x, const BicgOptions& options) {
    if (x.size() != b.size()) throw Error(ErrorKind::Shape, "bicg: initial guess does not match right-hand side");
    BicgResult result;
    double bnorm = b.norm();
    if (bnorm == 0.0) bnorm = 1.0;

    Eigen::VectorXd tmp(b.size());
    apply(x, tmp);
    Eigen::VectorXd r = b - tmp;
    Eigen::VectorXd rt = r;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(b.size());
    Eigen::VectorXd pt = p;
    Eigen::VectorXd q(b.size()), qt(b.size());

    double best = r.norm() / bnorm;
    Eigen::VectorXd best_x = x;
    result.relative_residual = best;
    if (best <= options.tolerance) {
        result.converged = true;
        return result;
    }

    double rho_prev = 1.0;
    for (int it = 1; it <= options.max_iterations; ++it) {
        const double rho = rt.dot(r);
        if (rho == 0.0 || !std::isfinite(rho)) break;
        if (it == 1) {
            p = r;
            pt = rt;
        } else {
            const double beta = rho / rho_prev;
            p = r + beta * p;
            pt = rt + beta * pt;
        }
        apply(p, q);
        apply_transpose(pt, qt);
        const double denom = pt.dot(q);
        if (denom == 0.0 || !std::isfinite(denom)) break;
        const double alpha = rho / denom;
        x += alpha * p;
        r -= alpha * q;
        rt -= alpha * qt;
        rho_prev = rho;
        result.iterations = it;

        const double res = r.norm() / bnorm;
        if (res < best) {
            best = res;
            best_x = x;
        }
        if (res <= options.tolerance) {
            result.converged = true;
            break;
        }
    }
    x = best_x;
    result.relative_residual = best;
    return result;
}

}  // namespace deblur
