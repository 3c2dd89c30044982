#include "deblur/config_file.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "deblur/error.hpp"

namespace deblur {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double d = 0;
    try {
        d = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) throw Error(ErrorKind::Parameter, key + ": '" + v + "' is not a number");
    return d;
}

long long to_int(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    long long i = 0;
    try {
        i = std::stoll(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) throw Error(ErrorKind::Parameter, key + ": '" + v + "' is not an integer");
    return i;
}

std::string fmt(double d) {
    std::ostringstream os;
    os.precision(17);
    os << d;
    return os.str();
}

}  // namespace

Settings read_settings(std::istream& in) {
    Settings out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::Parameter, "config line " + std::to_string(lineno) + " lacks '='");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw Error(ErrorKind::Parameter, "config line " + std::to_string(lineno) + " has no key");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

Settings load_settings(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::Io, "cannot read config " + path.string());
    return read_settings(f);
}

bool apply_setting(const std::string& key, const std::string& v, EstimationConfig& e, RestoreConfig& r) {
    const std::map<std::string, std::function<void()>> table{
        {"a", [&] { e.a = to_double(key, v); }},
        {"patch_side", [&] { e.patch_side = static_cast<int>(to_int(key, v)); }},
        {"atoms", [&] { e.atoms = static_cast<int>(to_int(key, v)); }},
        {"sparsity", [&] { e.sparsity = static_cast<int>(to_int(key, v)); }},
        {"neighbors", [&] { e.neighbors = static_cast<int>(to_int(key, v)); }},
        {"inner_iters", [&] { e.inner_iters = static_cast<int>(to_int(key, v)); }},
        {"lambda_c", [&] { e.lambda_c = to_double(key, v); }},
        {"lambda_s", [&] { e.lambda_s = to_double(key, v); }},
        {"lambda_g", [&] { e.lambda_g = to_double(key, v); }},
        {"lambda_h_per_pixel", [&] { e.lambda_h_per_pixel = to_double(key, v); }},
        {"kernel_size", [&] { e.kernel_size = static_cast<int>(to_int(key, v)); }},
        {"r", [&] { e.r = to_double(key, v); }},
        {"epsilon", [&] { e.epsilon = to_double(key, v); }},
        {"bicg_tolerance", [&] { e.bicg.tolerance = to_double(key, v); }},
        {"bicg_max_iterations", [&] { e.bicg.max_iterations = static_cast<int>(to_int(key, v)); }},
        {"seed", [&] { e.seed = static_cast<std::uint64_t>(to_int(key, v)); }},
        {"keep_fraction", [&] { e.keep_fraction = to_double(key, v); }},
        {"presmooth_sigma", [&] { e.presmooth_sigma = to_double(key, v); }},
        {"derivative_sigma", [&] { e.derivative_sigma = to_double(key, v); }},
        {"h_w", [&] { e.h_w = to_double(key, v); }},
        {"search",
         [&] {
             if (v == "exact") e.search = SearchMode::Exact;
             else if (v == "approximate") e.search = SearchMode::Approximate;
             else throw Error(ErrorKind::Parameter, "search must be exact or approximate");
         }},
        {"search_budget", [&] { e.search_budget = static_cast<int>(to_int(key, v)); }},
        {"ksvd_iterations", [&] { e.ksvd_iterations = static_cast<int>(to_int(key, v)); }},
        {"max_training_patches", [&] { e.max_training_patches = static_cast<int>(to_int(key, v)); }},
        {"mask_dump_dir", [&] { e.mask_dump_dir = v; }},
        {"recenter_kernel", [&] { e.recenter_kernel = to_int(key, v) != 0; }},
        {"subpixel_center", [&] { e.subpixel_center = to_int(key, v) != 0; }},
        {"kernel_mask_dilation", [&] { e.kernel_mask_dilation = static_cast<int>(to_int(key, v)); }},
        {"component_floor", [&] { e.component_floor = to_double(key, v); }},
        {"support_floor", [&] { e.support_floor = to_double(key, v); }},
        {"restore_method", [&] { r.method = parse_restore_method(v); }},
        {"restore_weight", [&] { r.weight = to_double(key, v); }},
        {"restore_iterations", [&] { r.iterations = static_cast<int>(to_int(key, v)); }},
        {"restore_alpha", [&] { r.alpha = to_double(key, v); }},
        {"restore_beta_min", [&] { r.beta_min = to_double(key, v); }},
        {"restore_beta_max", [&] { r.beta_max = to_double(key, v); }},
        {"restore_taper", [&] { r.taper = to_int(key, v) != 0; }},
    };
    const auto it = table.find(key);
    if (it == table.end()) return false;
    it->second();
    return true;
}

Settings materialize(const EstimationConfig& e, const RestoreConfig& r) {
    return {
        {"a", fmt(e.a)},
        {"patch_side", std::to_string(e.patch_side)},
        {"atoms", std::to_string(e.atoms)},
        {"sparsity", std::to_string(e.sparsity)},
        {"neighbors", std::to_string(e.neighbors)},
        {"inner_iters", std::to_string(e.inner_iters)},
        {"lambda_c", fmt(e.lambda_c)},
        {"lambda_s", fmt(e.lambda_s)},
        {"lambda_g", fmt(e.lambda_g)},
        {"lambda_h_per_pixel", fmt(e.lambda_h_per_pixel)},
        {"kernel_size", std::to_string(e.kernel_size)},
        {"r", fmt(e.r)},
        {"epsilon", fmt(e.epsilon)},
        {"bicg_tolerance", fmt(e.bicg.tolerance)},
        {"bicg_max_iterations", std::to_string(e.bicg.max_iterations)},
        {"seed", std::to_string(e.seed)},
        {"keep_fraction", fmt(e.keep_fraction)},
        {"presmooth_sigma", fmt(e.presmooth_sigma)},
        {"derivative_sigma", fmt(e.derivative_sigma)},
        {"h_w", fmt(e.h_w)},
        {"search", e.search == SearchMode::Exact ? "exact" : "approximate"},
        {"search_budget", std::to_string(e.search_budget)},
        {"ksvd_iterations", std::to_string(e.ksvd_iterations)},
        {"max_training_patches", std::to_string(e.max_training_patches)},
        {"mask_dump_dir", e.mask_dump_dir},
        {"recenter_kernel", e.recenter_kernel ? "1" : "0"},
        {"subpixel_center", e.subpixel_center ? "1" : "0"},
        {"kernel_mask_dilation", std::to_string(e.kernel_mask_dilation)},
        {"component_floor", fmt(e.component_floor)},
        {"support_floor", fmt(e.support_floor)},
        {"restore_method", to_string(r.method)},
        {"restore_weight", fmt(r.weight)},
        {"restore_iterations", std::to_string(r.iterations)},
        {"restore_alpha", fmt(r.alpha)},
        {"restore_beta_min", fmt(r.beta_min)},
        {"restore_beta_max", fmt(r.beta_max)},
        {"restore_taper", r.taper ? "1" : "0"},
    };
}

}  // namespace deblur
