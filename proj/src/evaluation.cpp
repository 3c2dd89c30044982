#include "deblur/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "deblur/cross_scale.hpp"
#include "deblur/error.hpp"
#include "deblur/filters.hpp"
#include "deblur/log.hpp"
#include "deblur/parallel.hpp"
#include "deblur/resample.hpp"

namespace deblur {

double error_ratio(const Image& x, const Image& x_hhat, const Image& x_htrue) {
    if (!x.same_shape(x_hhat) || !x.same_shape(x_htrue))
        throw Error(ErrorKind::Dimension, "error ratio needs images of equal size");
    const double num = squared_distance(x, x_hhat);
    const double den = squared_distance(x, x_htrue);
    if (den == 0.0) {
        log::warn("error ratio: reference restoration is exact, ratio is infinite");
        return std::numeric_limits<double>::infinity();
    }
    return num / den;
}

ErrorRatioReport aggregate(const std::vector<double>& ratios, double threshold) {
    if (ratios.empty()) throw Error(ErrorKind::Count, "aggregate needs at least one error ratio");
    ErrorRatioReport rep;
    rep.ratios = ratios;
    rep.threshold = threshold;
    std::size_t ok = 0;
    double sum = 0.0;
    for (double r : ratios) {
        if (r <= threshold) ++ok;
        sum += r;
    }
    rep.success_rate = static_cast<double>(ok) / static_cast<double>(ratios.size());
    rep.mean = sum / static_cast<double>(ratios.size());
    std::vector<double> sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
        rep.cumulative.emplace_back(sorted[i], static_cast<double>(i + 1) / static_cast<double>(sorted.size()));
    return rep;
}

Dictionary probe_dictionary(const Image& blurred, const EstimationConfig& cfg) {
    const Image small = downscale(to_gray(blurred), cfg.a);
    std::vector<PatchIndex> centers = all_patch_centers(small.width(), small.height(), cfg.patch_side);
    if (centers.size() > static_cast<std::size_t>(cfg.max_training_patches)) {
        const std::size_t step = (centers.size() + cfg.max_training_patches - 1) / cfg.max_training_patches;
        std::vector<PatchIndex> kept;
        for (std::size_t i = 0; i < centers.size(); i += step) kept.push_back(centers[i]);
        centers = std::move(kept);
    }
    const int atoms = std::min<int>(cfg.atoms, static_cast<int>(centers.size()));
    return ksvd_train(extract_patches(small, cfg.patch_side, centers), atoms, cfg.sparsity, cfg.ksvd_iterations, cfg.seed)
        .dictionary;
}

PatchErrors probe_patch_errors(const Image& image, const Dictionary& dict, const EstimationConfig& cfg,
                               const ProbeOptions& options) {
    const int side = cfg.patch_side;
    PatchErrors out;
    out.centers = strided_patch_centers(image.width(), image.height(), side, options.stride);
    const PatchMatrix patches = extract_patches(image, side, out.centers);
    const Image coarse = downscale(image, cfg.a);
    const PatchSearchIndex index(coarse, side);
    out.sparse.assign(out.centers.size(), 0.0);
    out.nonlocal.assign(out.centers.size(), 0.0);
    parallel_for(out.centers.size(), [&](std::size_t j) {
        const auto col = static_cast<Eigen::Index>(j);
        const Eigen::VectorXd q = patches.col(col);
        out.sparse[j] = (q - reconstruct(dict, omp_encode(dict, q, cfg.sparsity))).squaredNorm();
        NeighborSet set;
        set.query = out.centers[j];
        set.neighbors = index.search(q, options.neighbors, cfg.search, cfg.search_budget);
        std::vector<double> d;
        for (const auto& nb : set.neighbors) d.push_back(nb.distance);
        set.weights = nl_weights_from_distances(d, cfg.h_w);
        out.nonlocal[j] = (q - nl_predict(set, coarse, side)).squaredNorm();
    });
    return out;
}

namespace {

double rms(const std::vector<double>& errors, int n) {
    const double total = std::accumulate(errors.begin(), errors.end(), 0.0);
    return std::sqrt(total / (static_cast<double>(errors.size()) * n));
}

}  // namespace

ProbeReport probe_regularizers(const Image& sharp_in, const std::vector<Kernel>& blurs, const EstimationConfig& cfg,
                               const ProbeOptions& options) {
    const Image sharp = to_gray(sharp_in);
    std::vector<Image> images{sharp};
    std::vector<std::string> labels{"sharp"};
    for (const Kernel& k : blurs) {
        images.push_back(conv2(sharp, k, options.boundary));
        labels.push_back("blur " + std::to_string(k.size()));
    }
    // Averaging boxes of even side live on an (n+1) grid; label by support.
    for (std::size_t i = 0; i < blurs.size(); ++i) {
        int lo = blurs[i].size(), hi = -1;
        for (int v = 0; v < blurs[i].size(); ++v)
            for (int u = 0; u < blurs[i].size(); ++u)
                if (blurs[i](u, v) != 0.0) {
                    lo = std::min(lo, u);
                    hi = std::max(hi, u);
                }
        if (hi >= lo) labels[i + 1] = std::to_string(hi - lo + 1) + "x" + std::to_string(hi - lo + 1);
    }

    const Dictionary dict = probe_dictionary(images.size() > 1 ? images[1] : images[0], cfg);
    EdgeMaskOptions mopts;
    mopts.keep_fraction = cfg.keep_fraction;
    mopts.presmooth_sigma = cfg.presmooth_sigma;
    mopts.derivative_sigma = cfg.derivative_sigma;
    mopts.patch_side = cfg.patch_side;

    ProbeReport report;
    std::vector<PatchErrors> errors;
    for (const Image& img : images) errors.push_back(probe_patch_errors(img, dict, cfg, options));
    report.patches = errors.front().centers.size();

    const int w = sharp.width(), h = sharp.height();
    for (std::size_t v = 0; v < images.size(); ++v) {
        ProbeVariant pv;
        pv.label = labels[v];
        pv.sparse_rms = rms(errors[v].sparse, cfg.n());
        pv.nonlocal_rms = rms(errors[v].nonlocal, cfg.n());
        pv.edges = salient_edge_mask(images[v], mopts);
        if (v > 0) {
            pv.r_c = EdgeMask(w, h);
            pv.r_s = EdgeMask(w, h);
            std::size_t in_edges = 0, rc_edges = 0, rs_edges = 0, rc = 0, rs = 0;
            for (std::size_t j = 0; j < errors[0].centers.size(); ++j) {
                const PatchIndex c = errors[0].centers[j];
                const bool c_in = errors[0].sparse[j] <= errors[v].sparse[j];
                const bool s_in = errors[0].nonlocal[j] <= errors[v].nonlocal[j];
                const bool edge = pv.edges(c.x, c.y);
                pv.r_c.set(c.x, c.y, c_in);
                pv.r_s.set(c.x, c.y, s_in);
                rc += c_in;
                rs += s_in;
                in_edges += edge;
                rc_edges += c_in && edge;
                rs_edges += s_in && edge;
            }
            const auto total = static_cast<double>(errors[0].centers.size());
            pv.r_c_overall = static_cast<double>(rc) / total;
            pv.r_s_overall = static_cast<double>(rs) / total;
            pv.r_c_in_edges = in_edges ? static_cast<double>(rc_edges) / static_cast<double>(in_edges) : 0.0;
            pv.r_s_in_edges = in_edges ? static_cast<double>(rs_edges) / static_cast<double>(in_edges) : 0.0;
        }
        report.variants.push_back(std::move(pv));
    }
    return report;
}

nlohmann::json to_json(const ErrorRatioReport& report) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["threshold"] = report.threshold;
    j["success_rate"] = report.success_rate;
    j["mean"] = std::isfinite(report.mean) ? nlohmann::json(report.mean) : nlohmann::json("inf");
    auto& ratios = j["ratios"] = nlohmann::json::array();
    for (double r : report.ratios) ratios.push_back(std::isfinite(r) ? nlohmann::json(r) : nlohmann::json("inf"));
    auto& curve = j["cumulative"] = nlohmann::json::array();
    for (const auto& [x, y] : report.cumulative)
        curve.push_back({std::isfinite(x) ? nlohmann::json(x) : nlohmann::json("inf"), y});
    return j;
}

nlohmann::json to_json(const ProbeReport& report) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["patches"] = report.patches;
    auto& rows = j["variants"] = nlohmann::json::array();
    for (const auto& v : report.variants) {
        nlohmann::json row{{"label", v.label}, {"sparse_rms", v.sparse_rms}, {"nonlocal_rms", v.nonlocal_rms},
                           {"edge_count", v.edges.count}};
        if (!v.r_c.bits.empty()) {
            row["r_c_count"] = v.r_c.count;
            row["r_s_count"] = v.r_s.count;
            row["r_c_in_edges"] = v.r_c_in_edges;
            row["r_c_overall"] = v.r_c_overall;
            row["r_s_in_edges"] = v.r_s_in_edges;
            row["r_s_overall"] = v.r_s_overall;
        }
        rows.push_back(row);
    }
    return j;
}

void write_csv(std::ostream& out, const ErrorRatioReport& report) {
    out << "index,error_ratio\n";
    for (std::size_t i = 0; i < report.ratios.size(); ++i) out << i << ',' << report.ratios[i] << '\n';
}

void write_csv(std::ostream& out, const ProbeReport& report) {
    out << "label,sparse_rms,nonlocal_rms,r_c_in_edges,r_c_overall,r_s_in_edges,r_s_overall\n";
    for (const auto& v : report.variants)
        out << v.label << ',' << v.sparse_rms << ',' << v.nonlocal_rms << ',' << v.r_c_in_edges << ','
            << v.r_c_overall << ',' << v.r_s_in_edges << ',' << v.r_s_overall << '\n';
}

}  // namespace deblur
