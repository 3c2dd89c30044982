#pragma once

#include <string>
#include <vector>

#include "deblur/image.hpp"
#include "deblur/kernel.hpp"

namespace deblur {

enum class RestoreMethod { Wiener, HyperLaplacian, TvL1 };

RestoreMethod parse_restore_method(const std::string& name);
std::string to_string(RestoreMethod method);

struct RestoreConfig {
    RestoreMethod method = RestoreMethod::HyperLaplacian;
    double weight = 2e-3;
    int iterations = 30;
    double alpha = 2.0 / 3.0;  // hyper-Laplacian exponent
    double beta_min = 1.0;
    double beta_max = 256.0;
    bool taper = true;

    void validate() const;
};

struct RestoreTrace {
    // Splitting energy after each iteration (first channel only).
    std::vector<double> energy;
};

Image deconvolve(const Image& y, const Kernel& kernel, const RestoreConfig& cfg = {}, RestoreTrace* trace = nullptr);

// argmin_v |v|^alpha + beta/2 (v - g)^2.
double shrink_hyper_laplacian(double g, double beta, double alpha);

}  // namespace deblur
