#include "deblur/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>
#include <sstream>

#include "deblur/edge_taper.hpp"
#include "deblur/error.hpp"
#include "deblur/fft.hpp"
#include "deblur/log.hpp"
#include "deblur/parallel.hpp"
#include "deblur/resample.hpp"

namespace deblur {
namespace {

using cd = std::complex<double>;

Eigen::Map<const Eigen::VectorXd> as_vector(const Image& img) {
    return {img.data().data(), static_cast<Eigen::Index>(img.size())};
}

Image from_vector(const Eigen::VectorXd& v, int w, int h) {
    Image img(w, h);
    std::copy(v.data(), v.data() + v.size(), img.data().begin());
    return img;
}

void check_same_size(const GradientPair& a, const GradientPair& b) {
    if (!a.gx.same_shape(a.gy) || !a.gx.same_shape(b.gx) || !b.gx.same_shape(b.gy))
        throw Error(ErrorKind::Dimension, "gradient images differ in size");
    if (a.gx.channels() != 1) throw Error(ErrorKind::Channel, "gradients must be single-channel");
}

// |Dx|^2 + |Dy|^2 per bin.
std::vector<double> laplacian_symbol(int w, int h) {
    const Spectrum dx = dx_otf(w, h), dy = dy_otf(w, h);
    std::vector<double> out(dx.bins.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(dx.bins[i]) + std::norm(dy.bins[i]);
    return out;
}

}  // namespace

void EstimationConfig::validate() const {
    auto fail = [](const std::string& m) { throw Error(ErrorKind::Parameter, m); };
    if (!(a > 1.0)) fail("down-scaling factor must exceed 1");
    if (patch_side < 3 || patch_side % 2 == 0) fail("patch side must be odd and at least 3");
    if (atoms < 1) fail("dictionary size must be positive");
    if (sparsity < 1) fail("sparsity must be positive");
    if (neighbors < 1) fail("neighbor count must be positive");
    if (inner_iters < 0) fail("inner iteration count must be non-negative");
    if (lambda_c < 0 || lambda_s < 0 || lambda_g < 0 || lambda_h_per_pixel < 0) fail("weights must be non-negative");
    if (kernel_size < 1 || kernel_size % 2 == 0) fail("kernel size must be odd");
    if (!(r > 0)) fail("keep factor r must be positive");
    if (epsilon < 0) fail("convergence tolerance must be non-negative");
    if (bicg.max_iterations < 0 || !(bicg.tolerance >= 0)) fail("invalid BiCG settings");
    if (!(keep_fraction > 0 && keep_fraction <= 1)) fail("keep fraction must lie in (0, 1]");
    if (!(h_w > 0)) fail("non-local weight decay must be positive");
    if (search_budget < 1) fail("search budget must be positive");
    if (ksvd_iterations < 0) fail("K-SVD iteration count must be non-negative");
    if (max_training_patches < 1) fail("training patch cap must be positive");
    if (kernel_mask_dilation < 0) fail("kernel mask dilation must be non-negative");
    if (!(component_floor >= 0 && component_floor <= 1)) fail("component floor must lie in [0, 1]");
    if (!(support_floor >= 0 && support_floor < 1)) fail("support floor must lie in [0, 1)");
}

Image solve_kernel_fourier(const GradientPair& grad_y, const GradientPair& grad_x_masked, double lambda_h) {
    check_same_size(grad_y, grad_x_masked);
    const Spectrum fxx = fft2(grad_x_masked.gx), fxy = fft2(grad_x_masked.gy);
    const Spectrum fyx = fft2(grad_y.gx), fyy = fft2(grad_y.gy);
    Spectrum out(fxx.width, fxx.height);
    bool any = false;
    for (std::size_t i = 0; i < out.bins.size(); ++i) {
        const double den = std::norm(fxx.bins[i]) + std::norm(fxy.bins[i]);
        if (den > 0) any = true;
        const cd num = std::conj(fxx.bins[i]) * fyx.bins[i] + std::conj(fxy.bins[i]) * fyy.bins[i];
        out.bins[i] = den + lambda_h > 0 ? num / (den + lambda_h) : cd{};
    }
    if (!any) throw Error(ErrorKind::DegenerateGradient, "masked latent gradients are all zero");
    return ifft2(out);
}

Image embed_kernel(const Kernel& kernel, int w, int h) {
    if (kernel.size() > w || kernel.size() > h) throw Error(ErrorKind::Dimension, "kernel larger than the grid");
    Image full(w, h);
    const int r = kernel.radius();
    for (int v = 0; v < kernel.size(); ++v)
        for (int u = 0; u < kernel.size(); ++u) full(((u - r) % w + w) % w, ((v - r) % h + h) % h) += kernel(u, v);
    return full;
}

Kernel crop_kernel(const Image& full, int kernel_size) {
    if (kernel_size % 2 == 0 || kernel_size < 1) throw Error(ErrorKind::Parameter, "kernel size must be odd");
    if (kernel_size > full.width() || kernel_size > full.height())
        throw Error(ErrorKind::Dimension, "kernel size exceeds the image");
    Kernel k(kernel_size);
    const int r = k.radius();
    for (int v = 0; v < kernel_size; ++v)
        for (int u = 0; u < kernel_size; ++u) k(u, v) = full.wrapped(u - r, v - r);
    return k;
}

double kernel_objective(const GradientPair& grad_y, const GradientPair& grad_x_masked, const Image& full_kernel,
                        double lambda_h) {
    check_same_size(grad_y, grad_x_masked);
    if (!full_kernel.same_shape(grad_y.gx)) throw Error(ErrorKind::Dimension, "kernel grid differs from gradients");
    const Spectrum fk = fft2(full_kernel);
    double total = 0.0;
    for (int d = 0; d < 2; ++d) {
        const Image& gx = d == 0 ? grad_x_masked.gx : grad_x_masked.gy;
        const Image& gy = d == 0 ? grad_y.gx : grad_y.gy;
        Spectrum s = fft2(gx);
        for (std::size_t i = 0; i < s.bins.size(); ++i) s.bins[i] *= fk.bins[i];
        total += squared_distance(ifft2(s), gy);
    }
    const auto kv = as_vector(full_kernel);
    return total + lambda_h * kv.squaredNorm();
}

Kernel update_kernel(const GradientPair& grad_y, const GradientPair& grad_x_masked, double lambda_h, int kernel_size) {
    Image full = solve_kernel_fourier(grad_y, grad_x_masked, lambda_h);
    // Gradients carry no DC information; restore unit mass before cropping.
    const double shift = (1.0 - full.mean() * static_cast<double>(full.size())) / static_cast<double>(full.size());
    for (double& v : full.data()) v += shift;
    return project_kernel(crop_kernel(full, kernel_size));
}

LatentPriors compute_latent_priors(const Image& x_prev, const Dictionary& dict, const EdgeMask& mask,
                                   const EstimationConfig& cfg) {
    const int side = cfg.patch_side;
    LatentPriors priors;
    for (const PatchIndex& c : mask.centers())
        if (patch_in_bounds(x_prev.width(), x_prev.height(), side, c)) priors.centers.push_back(c);
    const auto m = static_cast<Eigen::Index>(priors.centers.size());
    priors.sparse = PatchMatrix::Zero(side * side, m);
    priors.nonlocal = PatchMatrix::Zero(side * side, 0);
    if (m == 0) return priors;
    if (dict.n() != side * side) throw Error(ErrorKind::Shape, "dictionary atoms do not match the patch side");

    const PatchMatrix patches = extract_patches(x_prev, side, priors.centers);
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t j) {
        const auto col = static_cast<Eigen::Index>(j);
        priors.sparse.col(col) = reconstruct(dict, omp_encode(dict, patches.col(col), cfg.sparsity));
    });

    Image coarse;
    try {
        coarse = downscale(x_prev, cfg.a);
    } catch (const Error&) {
        log::warn("latent update: image too small for the cross-scale prior");
        return priors;
    }
    if (all_patch_centers(coarse.width(), coarse.height(), side).size() < static_cast<std::size_t>(cfg.neighbors)) {
        log::warn("latent update: too few coarse patches for the cross-scale prior");
        return priors;
    }
    const PatchSearchIndex index(coarse, side);
    priors.nonlocal = PatchMatrix::Zero(side * side, m);
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t j) {
        const auto col = static_cast<Eigen::Index>(j);
        NeighborSet set;
        set.query = priors.centers[j];
        set.neighbors = index.search(patches.col(col), cfg.neighbors, cfg.search, cfg.search_budget);
        std::vector<double> d;
        for (const auto& nb : set.neighbors) d.push_back(nb.distance);
        set.weights = nl_weights_from_distances(d, cfg.h_w);
        priors.nonlocal.col(col) = nl_predict(set, coarse, side);
    });
    return priors;
}

LatentSolve solve_latent(const Image& y, const Kernel& kernel, const Image& x_prev, const LatentPriors& priors,
                         const LatentWeights& weights, const BicgOptions& options) {
    if (y.channels() != 1 || x_prev.channels() != 1) throw Error(ErrorKind::Channel, "latent solve is single-channel");
    if (!y.same_shape(x_prev)) throw Error(ErrorKind::Dimension, "x_prev and y differ in size");
    const int w = y.width(), h = y.height();
    const auto n_pix = static_cast<double>(y.plane_size());
    const Spectrum hk = kernel_otf(kernel, w, h);
    const std::vector<double> lap = laplacian_symbol(w, h);

    std::vector<double> symbol(lap.size());
    for (std::size_t i = 0; i < lap.size(); ++i) symbol[i] = (std::norm(hk.bins[i]) + weights.lambda_g) * lap[i];

    const std::size_t m = priors.centers.size();
    const bool have_nonlocal = m > 0 && priors.nonlocal.cols() == static_cast<Eigen::Index>(m);
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(priors.sparse.rows()))));
    if (m > 0 && priors.sparse.cols() != static_cast<Eigen::Index>(m))
        throw Error(ErrorKind::Shape, "sparse targets do not match the prior centers");

    Spectrum ys = fft2(y);
    for (std::size_t i = 0; i < ys.bins.size(); ++i) ys.bins[i] *= std::conj(hk.bins[i]) * lap[i];
    Eigen::VectorXd b = as_vector(ifft2(ys));

    Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(y.plane_size()));
    if (m == 0) {
        if (weights.lambda_c > 0 || weights.lambda_s > 0) log::warn("latent update: empty edge mask, patch priors dropped");
    } else {
        const double scale = n_pix / static_cast<double>(m);
        const double lambda_s = have_nonlocal ? weights.lambda_s : 0.0;
        const PatchAccumulation sparse = accumulate_patches(priors.sparse, priors.centers, w, h, side);
        diag = (weights.lambda_c + lambda_s) * scale * as_vector(sparse.coverage);
        b += weights.lambda_c * scale * as_vector(sparse.sum);
        if (have_nonlocal) {
            const PatchAccumulation nl = accumulate_patches(priors.nonlocal, priors.centers, w, h, side);
            b += lambda_s * scale * as_vector(nl.sum);
        }
    }

    const LinearOperator apply = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
        Spectrum s = fft2(from_vector(in, w, h));
        for (std::size_t i = 0; i < s.bins.size(); ++i) s.bins[i] *= symbol[i];
        out = as_vector(ifft2(s));
        out += diag.cwiseProduct(in);
    };

    Eigen::VectorXd x = as_vector(x_prev);
    LatentSolve result;
    result.stats = bicg(apply, apply, b, x, options);
    if (!result.stats.converged && options.max_iterations > 0)
        log::debug("latent update: BiCG stopped at relative residual " + std::to_string(result.stats.relative_residual));
    result.latent = from_vector(x, w, h);
    return result;
}

Image update_latent(const Image& y, const Kernel& kernel, const Image& x_prev, const Dictionary& dict,
                    const EdgeMask& mask, const EstimationConfig& cfg, BicgResult* stats) {
    const LatentPriors priors = compute_latent_priors(x_prev, dict, mask, cfg);
    LatentSolve s = solve_latent(y, kernel, x_prev, priors, {cfg.lambda_c, cfg.lambda_s, cfg.lambda_g}, cfg.bicg);
    if (stats) *stats = s.stats;
    s.latent.clamp(0.0, 1.0);
    return s.latent;
}

Dictionary train_level_dictionary(const Image& latent, const EstimationConfig& cfg, std::uint64_t seed) {
    const int side = cfg.patch_side;
    const std::size_t eligible = all_patch_centers(latent.width(), latent.height(), side).size();
    if (eligible == 0) throw Error(ErrorKind::TrainingData, "image too small for a single patch");
    EdgeMaskOptions opts;
    opts.patch_side = side;
    opts.presmooth_sigma = cfg.presmooth_sigma;
    opts.derivative_sigma = cfg.derivative_sigma;
    opts.keep_fraction =
        std::min(1.0, std::max(cfg.keep_fraction, 2.0 * cfg.atoms / static_cast<double>(eligible)));
    std::vector<PatchIndex> centers = salient_edge_mask(latent, opts).centers();
    if (centers.empty()) throw Error(ErrorKind::DegenerateData, "no edge patches to train a dictionary from");

    if (centers.size() > static_cast<std::size_t>(cfg.max_training_patches)) {
        std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
        std::vector<std::size_t> idx(centers.size());
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t i = 0; i < static_cast<std::size_t>(cfg.max_training_patches); ++i) {
            const std::size_t j = i + rng() % (idx.size() - i);
            std::swap(idx[i], idx[j]);
        }
        idx.resize(static_cast<std::size_t>(cfg.max_training_patches));
        std::sort(idx.begin(), idx.end());
        std::vector<PatchIndex> picked;
        for (auto i : idx) picked.push_back(centers[i]);
        centers = std::move(picked);
    }
    const int atoms = std::min<int>(cfg.atoms, static_cast<int>(centers.size()));
    if (atoms < cfg.atoms)
        log::warn("dictionary: only " + std::to_string(centers.size()) + " training patches, using " +
                  std::to_string(atoms) + " atoms");
    return ksvd_train(extract_patches(latent, side, centers), atoms, cfg.sparsity, cfg.ksvd_iterations, seed)
        .dictionary;
}

GradientPair observation_gradients(const Image& y) {
    GradientPair g = gradients(y);
    const int w = y.width(), h = y.height();
    for (int j = 0; j < h; ++j) g.gx(w - 1, j) = 0.0;
    for (int i = 0; i < w; ++i) g.gy(i, h - 1) = 0.0;
    return g;
}

namespace {

Kernel kernel_step(const GradientPair& grad_y, const LevelState& state, double lambda_h, int ks,
                   const EstimationConfig& cfg) {
    const EdgeMask mask = dilate_mask(state.mask, cfg.kernel_mask_dilation);
    Kernel k = update_kernel(grad_y, truncate_gradients(gradients(state.latent), mask, state.threshold), lambda_h, ks);
    if (cfg.recenter_kernel) k = project_kernel(k.centered(), 0.0);
    if (cfg.component_floor > 0.0 || cfg.support_floor > 0.0)
        k = drop_weak_components(k, cfg.component_floor, cfg.support_floor);
    return k;
}

}  // namespace

EstimationResult estimate(const Image& y_in, const EstimationConfig& cfg, const ProgressCallback& progress) {
    cfg.validate();
    const Image y = to_gray(y_in);
    if (!y.all_finite()) throw Error(ErrorKind::DegenerateData, "input contains non-finite values");
    if (y.max() == y.min()) throw Error(ErrorKind::DegenerateData, "input image is constant");
    if (cfg.kernel_size > std::min(y.width(), y.height()))
        throw Error(ErrorKind::Dimension, "kernel size exceeds the image");

    // Levels whose sides would drop below the resampling floor are skipped.
    const int depth = pyramid_depth(cfg.kernel_size, cfg.patch_side, cfg.a);
    std::vector<PyramidLevel> levels;
    for (int level = 1; level <= depth; ++level) {
        const double factor = std::pow(cfg.a, depth - level);
        if (level == depth) {
            levels.push_back({y, 1.0});
        } else if (std::lround(std::min(y.width(), y.height()) / factor) >= std::max(kMinResampledSide, cfg.patch_side + 2)) {
            levels.push_back({downscale(y, factor), 1.0 / factor});
        }
    }
    if (static_cast<int>(levels.size()) < depth)
        log::warn("pyramid: image too small for " + std::to_string(depth) + " levels, using " +
                  std::to_string(levels.size()));

    EstimationResult result;
    result.levels = static_cast<int>(levels.size());
    LevelState state;
    state.latent = levels.front().image;
    state.dictionary = train_level_dictionary(state.latent, cfg, cfg.seed);

    EdgeMaskOptions mask_opts;
    mask_opts.keep_fraction = cfg.keep_fraction;
    mask_opts.presmooth_sigma = cfg.presmooth_sigma;
    mask_opts.derivative_sigma = cfg.derivative_sigma;
    mask_opts.patch_side = cfg.patch_side;

    for (std::size_t li = 0; li < levels.size(); ++li) {
        const Image& yl = levels[li].image;
        const int w = yl.width(), h = yl.height();
        const int level = static_cast<int>(li) + 1;
        int ks = round_up_to_odd(cfg.kernel_size * levels[li].scale);
        const int max_ks = std::min(w, h) % 2 == 1 ? std::min(w, h) : std::min(w, h) - 1;
        ks = std::min(ks, max_ks);
        const double lambda_h = cfg.lambda_h_per_pixel * static_cast<double>(yl.plane_size());
        const GradientPair grad_y = observation_gradients(yl);

        if (li > 0) state.latent = upscale_bilinear(state.latent, w, h);
        state.threshold = init_threshold(gradients(state.latent), ks * ks, cfg.r);
        state.iteration = 0;

        auto context = [&](const Error& e) {
            std::ostringstream os;
            os << "level " << level << ", iteration " << state.iteration << ": " << e.detail();
            return Error(e.kind(), os.str());
        };

        try {
            if (cfg.inner_iters == 0) {
                state.mask = salient_edge_mask(state.latent, mask_opts);
                state.kernel = kernel_step(grad_y, state, lambda_h, ks, cfg);
                result.kernel = cfg.subpixel_center ? project_kernel(state.kernel.subpixel_centered(), 0.0) : state.kernel;
                result.latent = state.latent;
                return result;
            }
            for (state.iteration = 0; state.iteration < cfg.inner_iters;) {
                state.mask = salient_edge_mask(state.latent, mask_opts);
                if (!cfg.mask_dump_dir.empty()) {
                    const auto path = std::filesystem::path(cfg.mask_dump_dir) /
                                      ("mask_l" + std::to_string(level) + "_k" + std::to_string(state.iteration) + ".pgm");
                    write_mask_pgm(path.string(), state.mask);
                }
                state.kernel = kernel_step(grad_y, state, lambda_h, ks, cfg);

                BicgResult stats;
                const Image tapered = edge_taper(yl, state.kernel);
                Image next = update_latent(tapered, state.kernel, state.latent, state.dictionary, state.mask, cfg, &stats);
                const double change = squared_distance(next, state.latent) / static_cast<double>(yl.plane_size());
                state.latent = std::move(next);

                IterationReport rep;
                rep.level = level;
                rep.iteration = state.iteration;
                rep.width = w;
                rep.height = h;
                rep.kernel_size = ks;
                rep.tau = state.threshold.tau;
                rep.mask_count = state.mask.count;
                rep.bicg_iterations = stats.iterations;
                rep.bicg_residual = stats.relative_residual;
                rep.change = change;
                result.history.push_back(rep);
                if (progress) progress(rep);
                std::ostringstream os;
                os << "level " << level << "/" << levels.size() << " k=" << state.iteration << " size=" << w << "x" << h
                   << " ks=" << ks << " tau=" << rep.tau << " |M|=" << rep.mask_count
                   << " bicg=" << rep.bicg_iterations << " res=" << rep.bicg_residual << " change=" << change;
                log::debug(os.str());

                state.threshold.advance();
                ++state.iteration;
                if (change <= cfg.epsilon) break;
            }
            if (li + 1 < levels.size())
                state.dictionary = train_level_dictionary(state.latent, cfg, cfg.seed + 7919ULL * level);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DegenerateGradient || li + 1 == levels.size()) throw context(e);
            log::warn(std::string("skipping ") + context(e).detail());
        }
    }
    result.kernel = cfg.subpixel_center ? project_kernel(state.kernel.subpixel_centered(), 0.0) : state.kernel;
    result.latent = state.latent;
    return result;
}

}  // namespace deblur
