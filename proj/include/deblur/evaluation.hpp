#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "deblur/edges.hpp"
#include "deblur/estimator.hpp"
#include "deblur/image.hpp"
#include "deblur/kernel.hpp"

namespace deblur {

// |x - x_hhat|^2 / |x - x_htrue|^2; +inf (with a warning) when the
// denominator vanishes.
double error_ratio(const Image& x, const Image& x_hhat, const Image& x_htrue);

struct ErrorRatioReport {
    std::vector<double> ratios;
    double threshold = 3.0;
    double success_rate = 0.0;
    double mean = 0.0;
    std::vector<std::pair<double, double>> cumulative;  // (ER, fraction of images <= ER), ER ascending
};

ErrorRatioReport aggregate(const std::vector<double>& ratios, double threshold);

struct ProbeOptions {
    int stride = 1;      // patch-center stride for the all-patch averages
    int neighbors = 5;   // p for the cross-scale prediction
    Boundary boundary = Boundary::Replicate;
};

struct PatchErrors {
    std::vector<PatchIndex> centers;
    std::vector<double> sparse;    // |Q_j v - D alpha_j|^2
    std::vector<double> nonlocal;  // |Q_j v - sum_i w_i R_i v^a|^2
};

struct ProbeVariant {
    std::string label;
    double sparse_rms = 0.0;    // sqrt(Reg_c / (patches * n))
    double nonlocal_rms = 0.0;  // sqrt(Reg_s / (patches * n))
    EdgeMask r_c;               // empty for the sharp row
    EdgeMask r_s;
    EdgeMask edges;             // salient edges of this variant
    double r_c_in_edges = 0.0;  // |R_c & M| / |M|
    double r_c_overall = 0.0;   // |R_c| / patches
    double r_s_in_edges = 0.0;
    double r_s_overall = 0.0;
};

struct ProbeReport {
    std::vector<ProbeVariant> variants;  // sharp first, then one per blur
    std::size_t patches = 0;
};

// Per-patch errors of one image against a fixed dictionary.
PatchErrors probe_patch_errors(const Image& image, const Dictionary& dict, const EstimationConfig& cfg,
                               const ProbeOptions& options);

// Dictionary protocol of the probe: K-SVD on patches of the down-scaled blurred image.
Dictionary probe_dictionary(const Image& blurred, const EstimationConfig& cfg);

ProbeReport probe_regularizers(const Image& sharp, const std::vector<Kernel>& blurs, const EstimationConfig& cfg,
                               const ProbeOptions& options = {});

nlohmann::json to_json(const ErrorRatioReport& report);
nlohmann::json to_json(const ProbeReport& report);
void write_csv(std::ostream& out, const ErrorRatioReport& report);
void write_csv(std::ostream& out, const ProbeReport& report);

}  // namespace deblur
