#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "deblur/bicg.hpp"
#include "deblur/cross_scale.hpp"
#include "deblur/dictionary.hpp"
#include "deblur/edges.hpp"
#include "deblur/filters.hpp"
#include "deblur/image.hpp"
#include "deblur/kernel.hpp"

namespace deblur {

struct EstimationConfig {
    double a = 4.0 / 3.0;
    int patch_side = 5;
    int atoms = 100;      // t
    int sparsity = 4;     // T
    int neighbors = 1;    // p
    int inner_iters = 14;
    double lambda_c = 0.04 / 25.0;
    double lambda_s = 0.04 / 25.0;
    double lambda_g = 0.003;
    double lambda_h_per_pixel = 0.0003;  // lambda_h = this * N at each level
    int kernel_size = 51;
    double r = 2.0;
    double epsilon = 1e-6;  // mean squared change between iterates
    BicgOptions bicg;
    std::uint64_t seed = 0;

    double keep_fraction = 0.02;
    double presmooth_sigma = 1.0;
    double derivative_sigma = 1.0;
    double h_w = 0.1 * 25.0;
    SearchMode search = SearchMode::Approximate;
    int search_budget = 256;
    int ksvd_iterations = 10;
    int max_training_patches = 20000;
    std::string mask_dump_dir;  // empty: no dumps

    // Kernel-step stabilizers.
    bool recenter_kernel = true;     // integer centroid shift after every kernel update
    bool subpixel_center = false;    // bilinear centroid shift of the returned kernel
    int kernel_mask_dilation = 1;    // radius applied to M for the kernel step only
    double component_floor = 0.1;    // drop kernel components lighter than this share of the main one
    double support_floor = 0.33;     // taps below this share of the peak are cleared before that

    int n() const noexcept { return patch_side * patch_side; }
    // Throws Parameter on out-of-range values.
    void validate() const;
};

struct IterationReport {
    int level = 0;  // 1 = coarsest
    int iteration = 0;
    int width = 0;
    int height = 0;
    int kernel_size = 0;
    double tau = 0.0;
    std::size_t mask_count = 0;
    int bicg_iterations = 0;
    double bicg_residual = 0.0;
    double change = 0.0;  // mean squared latent change
};

struct LevelState {
    Image latent;
    Kernel kernel;
    Dictionary dictionary;
    EdgeMask mask;
    ThresholdState threshold;
    int iteration = 0;
};

struct EstimationResult {
    Kernel kernel;
    Image latent;
    int levels = 0;
    std::vector<IterationReport> history;
};

// Unconstrained minimizer of |grad_y - h * grad_x|^2 + lambda_h |h|^2 over
// full-size periodic kernels; pixel (dx mod w, dy mod h) holds the tap at
// offset (dx, dy).
Image solve_kernel_fourier(const GradientPair& grad_y, const GradientPair& grad_x_masked, double lambda_h);

// Periodic embedding of a kernel into a w x h grid, center at the origin.
Image embed_kernel(const Kernel& kernel, int w, int h);

// Central window of a full-size periodic kernel.
Kernel crop_kernel(const Image& full, int kernel_size);

// Value of the kernel objective for a full-size periodic kernel.
double kernel_objective(const GradientPair& grad_y, const GradientPair& grad_x_masked, const Image& full_kernel,
                        double lambda_h);

// Fourier solve, DC restoration, central crop and projection.
Kernel update_kernel(const GradientPair& grad_y, const GradientPair& grad_x_masked, double lambda_h, int kernel_size);

// Prediction targets for the two patch priors at the mask centers.
struct LatentPriors {
    std::vector<PatchIndex> centers;
    PatchMatrix sparse;    // D alpha_j, one column per center
    PatchMatrix nonlocal;  // sum_i w_i R_i X^a; zero columns when unavailable
};

LatentPriors compute_latent_priors(const Image& x_prev, const Dictionary& dict, const EdgeMask& mask,
                                   const EstimationConfig& cfg);

struct LatentWeights {
    double lambda_c = 0.0;
    double lambda_s = 0.0;
    double lambda_g = 0.0;
};

struct LatentSolve {
    Image latent;  // not clamped
    BicgResult stats;
};

// BiCG solve of the latent normal equations started from x_prev.
LatentSolve solve_latent(const Image& y, const Kernel& kernel, const Image& x_prev, const LatentPriors& priors,
                         const LatentWeights& weights, const BicgOptions& options);

// Priors from x_prev, solve, clamp to [0,1].
Image update_latent(const Image& y, const Kernel& kernel, const Image& x_prev, const Dictionary& dict,
                    const EdgeMask& mask, const EstimationConfig& cfg, BicgResult* stats = nullptr);

// K-SVD on salient-edge patches of a latent estimate.
Dictionary train_level_dictionary(const Image& latent, const EstimationConfig& cfg, std::uint64_t seed);

// Periodic forward differences of y with the wrap-around row and column zeroed.
GradientPair observation_gradients(const Image& y);

using ProgressCallback = std::function<void(const IterationReport&)>;

EstimationResult estimate(const Image& y, const EstimationConfig& cfg, const ProgressCallback& progress = {});

}  // namespace deblur
