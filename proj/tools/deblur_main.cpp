#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "deblur/config_file.hpp"
#include "deblur/error.hpp"
#include "deblur/estimator.hpp"
#include "deblur/evaluation.hpp"
#include "deblur/image_io.hpp"
#include "deblur/kernel_io.hpp"
#include "deblur/log.hpp"
#include "deblur/parallel.hpp"
#include "deblur/restore.hpp"
#include "deblur/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace deblur;

namespace {

enum Exit : int {
    kOk = 0,
    kFailure = 1,
    kUnreadableInput = 2,
    kDegenerateImage = 3,
    kMalformedKernel = 4,
    kNegativeNoise = 5,
    kMismatchedTriple = 6,
};

struct ExitError : std::runtime_error {
    ExitError(int c, const std::string& m) : std::runtime_error(m), code(c) {}
    int code;
};

class Stopwatch {
public:
    void lap(const std::string& stage) {
        const auto now = std::chrono::steady_clock::now();
        timings_[stage] += std::chrono::duration<double>(now - last_).count();
        last_ = now;
    }
    json to_json() const { return json(timings_); }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
    std::map<std::string, double> timings_;
};

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    bool json_out = false;
    bool verbose = false;
    std::string manifest;
    std::vector<std::string> sets;
    std::optional<int> kernel_size;
    std::optional<int> inner_iters;
    std::optional<std::string> method;
    std::optional<double> weight;

    std::string input;
    std::string output;
    std::string out_dir = ".";
    std::string kernel;
    bool blind = false;
    int bit_depth = 8;
    std::optional<int> motion;
    double noise = 1.0;
    std::string kernel_out;
    std::vector<int> blurs{2, 3, 5};
    int stride = 1;
    int probe_neighbors = 5;
    std::string csv;
    double threshold = 3.0;
};

Image load_input(const std::string& path) {
    try {
        return read_image(path);
    } catch (const Error& e) {
        throw ExitError(kUnreadableInput, e.what());
    }
}

Kernel load_kernel_file(const std::string& path) {
    try {
        return load_kernel(path);
    } catch (const Error& e) {
        throw ExitError(e.kind() == ErrorKind::Io ? kUnreadableInput : kMalformedKernel, e.what());
    }
}

void resolve_configs(const Options& o, EstimationConfig& est, RestoreConfig& rest) {
    if (!o.config.empty()) {
        Settings file;
        try {
            file = load_settings(o.config);
        } catch (const Error& e) {
            throw ExitError(e.kind() == ErrorKind::Io ? kUnreadableInput : kFailure, e.what());
        }
        for (const auto& [k, v] : file)
            if (!apply_setting(k, v, est, rest)) log::warn("config: unknown key '" + k + "' ignored");
    }
    for (const std::string& kv : o.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::Parameter, "--set expects key=value, got '" + kv + "'");
        if (!apply_setting(kv.substr(0, eq), kv.substr(eq + 1), est, rest))
            throw Error(ErrorKind::Parameter, "unknown setting '" + kv.substr(0, eq) + "'");
    }
    if (o.kernel_size) est.kernel_size = *o.kernel_size;
    if (o.inner_iters) est.inner_iters = *o.inner_iters;
    if (o.method) rest.method = parse_restore_method(*o.method);
    if (o.weight) rest.weight = *o.weight;
    if (o.seed) est.seed = *o.seed;
    if (est.kernel_size > 0 && est.kernel_size % 2 == 0) {
        log::warn("kernel size " + std::to_string(est.kernel_size) + " is even, using " +
                  std::to_string(est.kernel_size + 1));
        est.kernel_size += 1;
    }
    est.validate();
    rest.validate();
}

json config_json(const EstimationConfig& est, const RestoreConfig& rest) {
    json j;
    for (const auto& [k, v] : materialize(est, rest)) {
        if (v == "true" || v == "false") {
            j[k] = v == "true";
            continue;
        }
        char* end = nullptr;
        const double d = std::strtod(v.c_str(), &end);
        if (!v.empty() && end == v.c_str() + v.size()) {
            if (d == std::floor(d) && v.find_first_of(".eE") == std::string::npos)
                j[k] = static_cast<long long>(d);
            else
                j[k] = d;
        } else {
            j[k] = v;
        }
    }
    return j;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw Error(ErrorKind::Io, "cannot write " + path);
    f << j.dump(2) << '\n';
}

json history_json(const std::vector<IterationReport>& history) {
    json arr = json::array();
    for (const auto& r : history)
        arr.push_back({{"level", r.level}, {"iteration", r.iteration}, {"width", r.width}, {"height", r.height},
                       {"kernel_size", r.kernel_size}, {"tau", r.tau}, {"mask_count", r.mask_count},
                       {"bicg_iterations", r.bicg_iterations}, {"bicg_residual", r.bicg_residual},
                       {"change", r.change}});
    return arr;
}

ProgressCallback progress_printer(const Options& o) {
    if (!(o.verbose && o.json_out)) return {};
    return [](const IterationReport& r) {
        std::cerr << json{{"level", r.level}, {"iteration", r.iteration}, {"tau", r.tau}, {"mask_count", r.mask_count},
                          {"bicg_iterations", r.bicg_iterations}, {"bicg_residual", r.bicg_residual}}
                         .dump()
                  << '\n';
    };
}

std::uint64_t seed_of(const Options& o, const EstimationConfig& est) { return o.seed ? *o.seed : est.seed; }

struct Outcome {
    json summary;
    json inputs;
    json outputs;
    std::string manifest_path;
};

Outcome cmd_estimate(const Options& o, const EstimationConfig& est, Stopwatch& sw) {
    const Image y = load_input(o.input);
    sw.lap("load");
    if (y.max() == y.min()) throw ExitError(kDegenerateImage, "input image is constant");
    const EstimationResult res = estimate(y, est, progress_printer(o));
    sw.lap("estimate");
    fs::create_directories(o.out_dir);
    const fs::path dir(o.out_dir);
    save_kernel(dir / "kernel.txt", res.kernel);
    save_kernel_image(dir / "kernel.png", res.kernel);
    write_image(dir / "latent.png", res.latent, 8);
    sw.lap("write");
    Outcome out;
    out.inputs = {{"image", o.input}};
    out.outputs = {{"kernel", (dir / "kernel.txt").string()}, {"kernel_image", (dir / "kernel.png").string()},
                   {"latent", (dir / "latent.png").string()}};
    out.summary = {{"kernel_size", res.kernel.size()}, {"levels", res.levels}, {"history", history_json(res.history)}};
    out.manifest_path = (dir / "manifest.json").string();
    return out;
}

Outcome cmd_deblur(const Options& o, const EstimationConfig& est, const RestoreConfig& rest, Stopwatch& sw) {
    if (o.kernel.empty() == !o.blind) throw Error(ErrorKind::Parameter, "deblur needs exactly one of --kernel or --blind");
    if (o.output.empty()) throw Error(ErrorKind::Parameter, "deblur needs --output");
    const Image y = load_input(o.input);
    Kernel k;
    Outcome out;
    out.inputs = {{"image", o.input}};
    if (o.blind) {
        if (y.max() == y.min()) throw ExitError(kDegenerateImage, "input image is constant");
        sw.lap("load");
        const EstimationResult res = estimate(y, est, progress_printer(o));
        k = res.kernel;
        out.summary["history"] = history_json(res.history);
        sw.lap("estimate");
        const std::string kpath = o.output + ".kernel.txt";
        save_kernel(kpath, k);
        out.outputs["kernel"] = kpath;
    } else {
        k = load_kernel_file(o.kernel);
        out.inputs["kernel"] = o.kernel;
        sw.lap("load");
    }
    const Image x = deconvolve(y, k, rest);
    sw.lap("restore");
    write_image(o.output, x, o.bit_depth);
    sw.lap("write");
    out.outputs["image"] = o.output;
    out.summary["kernel_size"] = k.size();
    out.summary["method"] = to_string(rest.method);
    out.manifest_path = o.output + ".manifest.json";
    return out;
}

Outcome cmd_synth(const Options& o, const EstimationConfig& est, Stopwatch& sw) {
    if (o.noise < 0) throw ExitError(kNegativeNoise, "noise level must be non-negative");
    if (o.output.empty()) throw Error(ErrorKind::Parameter, "synth needs --output");
    if (o.kernel.empty() == !o.motion) throw Error(ErrorKind::Parameter, "synth needs exactly one of --kernel or --motion");
    const Image x = load_input(o.input);
    const std::uint64_t seed = seed_of(o, est);
    Outcome out;
    out.inputs = {{"image", o.input}};
    Kernel k;
    if (o.motion) {
        int size = *o.motion;
        if (size % 2 == 0) {
            log::warn("motion kernel size " + std::to_string(size) + " is even, using " + std::to_string(size + 1));
            ++size;
        }
        k = motion_kernel(size, seed);
    } else {
        k = load_kernel_file(o.kernel);
        out.inputs["kernel"] = o.kernel;
    }
    sw.lap("load");
    const Image y = synthesize_blur(x, k, o.noise, seed + 1);
    sw.lap("synthesize");
    write_image(o.output, y, o.bit_depth);
    out.outputs["image"] = o.output;
    if (!o.kernel_out.empty()) {
        save_kernel(o.kernel_out, k);
        out.outputs["kernel"] = o.kernel_out;
    }
    sw.lap("write");
    out.summary = {{"kernel_size", k.size()}, {"noise_percent", o.noise}};
    out.manifest_path = o.output + ".manifest.json";
    return out;
}

Outcome cmd_probe(const Options& o, const EstimationConfig& est, Stopwatch& sw) {
    const Image x = load_input(o.input);
    sw.lap("load");
    std::vector<Kernel> blurs;
    for (int b : o.blurs) {
        if (b < 1) throw Error(ErrorKind::Parameter, "blur sizes must be positive");
        blurs.push_back(Kernel::box(b));
    }
    ProbeOptions popts;
    popts.stride = o.stride;
    popts.neighbors = o.probe_neighbors;
    const ProbeReport rep = probe_regularizers(x, blurs, est, popts);
    sw.lap("probe");
    Outcome out;
    out.inputs = {{"image", o.input}};
    out.summary = to_json(rep);
    if (!o.output.empty()) {
        write_json_file(o.output, out.summary);
        out.outputs["report"] = o.output;
        out.manifest_path = o.output + ".manifest.json";
    }
    if (!o.csv.empty()) {
        std::ofstream f(o.csv);
        write_csv(f, rep);
        out.outputs["csv"] = o.csv;
    }
    return out;
}

struct Triple {
    std::string sharp, blurry, kernel, estimated;
};

std::vector<Triple> read_triples(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ExitError(kUnreadableInput, "cannot read list " + path);
    const fs::path base = fs::path(path).parent_path();
    auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? p : (base / p).string(); };
    std::vector<Triple> out;
    std::string line;
    while (std::getline(f, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream is(line);
        std::vector<std::string> cols;
        for (std::string c; is >> c;) cols.push_back(c);
        if (cols.empty()) continue;
        if (cols.size() < 3 || cols.size() > 4)
            throw Error(ErrorKind::Parameter, "list lines need: sharp blurry kernel [estimated_kernel]");
        out.push_back({resolve(cols[0]), resolve(cols[1]), resolve(cols[2]), cols.size() == 4 ? resolve(cols[3]) : ""});
    }
    if (out.empty()) throw Error(ErrorKind::Parameter, "list " + path + " names no images");
    return out;
}

Outcome cmd_eval(const Options& o, const EstimationConfig& est, const RestoreConfig& rest, Stopwatch& sw) {
    const auto triples = read_triples(o.input);
    std::vector<double> ratios;
    json rows = json::array();
    for (const Triple& t : triples) {
        const Image x = load_input(t.sharp);
        const Image y = load_input(t.blurry);
        if (x.width() != y.width() || x.height() != y.height() || x.channels() != y.channels())
            throw ExitError(kMismatchedTriple, "sharp and blurry images differ in size: " + t.sharp + ", " + t.blurry);
        const Kernel h = load_kernel_file(t.kernel);
        sw.lap("load");
        Kernel hhat;
        if (!t.estimated.empty()) {
            hhat = load_kernel_file(t.estimated);
        } else {
            hhat = estimate(y, est, progress_printer(o)).kernel;
            sw.lap("estimate");
        }
        const Image xh = deconvolve(y, h, rest);
        const Image xhhat = deconvolve(y, hhat, rest);
        sw.lap("restore");
        const double er = error_ratio(x, xhhat, xh);
        ratios.push_back(er);
        rows.push_back({{"sharp", t.sharp}, {"blurry", t.blurry}, {"error_ratio", std::isfinite(er) ? json(er) : json("inf")}});
    }
    const ErrorRatioReport rep = aggregate(ratios, o.threshold);
    Outcome out;
    out.inputs = {{"list", o.input}};
    out.summary = to_json(rep);
    out.summary["images"] = rows;
    if (!o.output.empty()) {
        write_json_file(o.output, out.summary);
        out.outputs["report"] = o.output;
        out.manifest_path = o.output + ".manifest.json";
    }
    if (!o.csv.empty()) {
        std::ofstream f(o.csv);
        write_csv(f, rep);
        out.outputs["csv"] = o.csv;
    }
    return out;
}

int run(const std::vector<std::string>& args, int depth);

int cmd_replay(const std::string& manifest_path, int depth) {
    if (depth > 0) throw Error(ErrorKind::Parameter, "a replayed manifest cannot replay another manifest");
    std::ifstream f(manifest_path);
    if (!f) throw ExitError(kUnreadableInput, "cannot read manifest " + manifest_path);
    json m;
    try {
        m = json::parse(f);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parameter, std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!m.contains("argv") || !m["argv"].is_array()) throw Error(ErrorKind::Parameter, "manifest lacks an argv array");
    return run(m["argv"].get<std::vector<std::string>>(), depth + 1);
}

int run(const std::vector<std::string>& args, int depth) {
    CLI::App app{"Blind motion deblurring: kernel estimation, restoration, synthesis and evaluation", "deblur"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--config", o.config, "key=value settings file");
    app.add_option("--seed", o.seed, "random seed");
    app.add_option("--threads", o.threads, "worker threads (default: DEBLUR_THREADS or all cores)");
    app.add_flag("--json", o.json_out, "print a JSON summary on stdout");
    app.add_flag("--verbose", o.verbose, "log progress to stderr");
    app.add_option("--manifest", o.manifest, "manifest path (default derives from the output)");
    app.add_option("--set", o.sets, "override any setting, key=value");

    auto add_tuning = [&](CLI::App* sub) {
        sub->add_option("--kernel-size", o.kernel_size, "kernel side (odd; even values are rounded up)");
        sub->add_option("--inner-iters", o.inner_iters, "iterations per pyramid level");
        sub->add_option("--method", o.method, "restoration method: hyper_laplacian, tv_l1, wiener");
        sub->add_option("--weight", o.weight, "restoration regularization weight");
    };

    auto* est = app.add_subcommand("estimate", "estimate the blur kernel of an image");
    est->add_option("input", o.input, "blurry image")->required();
    est->add_option("--out-dir,-o", o.out_dir, "directory for kernel.txt, kernel.png, latent.png, manifest.json");
    add_tuning(est);

    auto* deb = app.add_subcommand("deblur", "restore an image with a given or estimated kernel");
    deb->add_option("input", o.input, "blurry image")->required();
    deb->add_option("--kernel,-k", o.kernel, "kernel file");
    deb->add_flag("--blind", o.blind, "estimate the kernel first");
    deb->add_option("--output,-o", o.output, "restored image")->required();
    deb->add_option("--bit-depth", o.bit_depth, "8 or 16")->check(CLI::IsMember({8, 16}));
    add_tuning(deb);

    auto* syn = app.add_subcommand("synth", "blur a sharp image and add Gaussian noise");
    syn->add_option("input", o.input, "sharp image")->required();
    syn->add_option("--kernel,-k", o.kernel, "kernel file");
    syn->add_option("--motion", o.motion, "generate a random motion kernel of this size");
    syn->add_option("--noise", o.noise, "noise standard deviation, percent of the intensity range");
    syn->add_option("--output,-o", o.output, "blurred image")->required();
    syn->add_option("--kernel-out", o.kernel_out, "write the ground-truth kernel here");
    auto* syn_depth = syn->add_option("--bit-depth", o.bit_depth, "8 or 16 (default 16)")->check(CLI::IsMember({8, 16}));

    auto* prb = app.add_subcommand("probe", "compare the patch regularizers on sharp and box-blurred copies");
    prb->add_option("input", o.input, "sharp image")->required();
    prb->add_option("--blurs", o.blurs, "box blur sides")->delimiter(',');
    prb->add_option("--stride", o.stride, "patch-center stride");
    prb->add_option("--neighbors", o.probe_neighbors, "similar patches per query");
    prb->add_option("--output,-o", o.output, "JSON report");
    prb->add_option("--csv", o.csv, "CSV report");
    add_tuning(prb);

    auto* evl = app.add_subcommand("eval", "error ratios over a list of sharp/blurry/kernel triples");
    evl->add_option("list", o.input, "text file: sharp blurry kernel [estimated_kernel] per line")->required();
    evl->add_option("--threshold", o.threshold, "success threshold (3 or 5 in the usual protocols)");
    evl->add_option("--output,-o", o.output, "JSON report");
    evl->add_option("--csv", o.csv, "CSV report");
    add_tuning(evl);

    std::string replay_path;
    auto* rep = app.add_subcommand("replay", "re-run the command recorded in a manifest");
    rep->add_option("manifest", replay_path, "manifest JSON")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kFailure;
    }

    log::set_verbose(o.verbose);
    if (o.threads > 0) set_thread_count(o.threads);
    if (rep->parsed()) return cmd_replay(replay_path, depth);
    if (syn->parsed() && syn_depth->count() == 0) o.bit_depth = 16;

    EstimationConfig est_cfg;
    RestoreConfig rest_cfg;
    resolve_configs(o, est_cfg, rest_cfg);

    Stopwatch sw;
    Outcome out;
    std::string command;
    if (est->parsed()) {
        command = "estimate";
        out = cmd_estimate(o, est_cfg, sw);
    } else if (deb->parsed()) {
        command = "deblur";
        out = cmd_deblur(o, est_cfg, rest_cfg, sw);
    } else if (syn->parsed()) {
        command = "synth";
        out = cmd_synth(o, est_cfg, sw);
    } else if (prb->parsed()) {
        command = "probe";
        out = cmd_probe(o, est_cfg, sw);
    } else {
        command = "eval";
        out = cmd_eval(o, est_cfg, rest_cfg, sw);
    }

    json manifest;
    manifest["schema_version"] = 1;
    manifest["command"] = command;
    manifest["argv"] = args;
    manifest["config"] = config_json(est_cfg, rest_cfg);
    manifest["seed"] = seed_of(o, est_cfg);
    manifest["threads"] = thread_count();
    manifest["inputs"] = out.inputs;
    manifest["outputs"] = out.outputs;
    manifest["timings"] = sw.to_json();
    manifest["warnings"] = log::take_warnings();
    manifest["result"] = out.summary;
    const std::string manifest_path = o.manifest.empty() ? out.manifest_path : o.manifest;
    if (!manifest_path.empty()) write_json_file(manifest_path, manifest);

    if (o.json_out) {
        std::cout << manifest.dump(2) << '\n';
    } else {
        std::cout << command << ": done";
        for (const auto& [k, v] : out.outputs.items()) std::cout << "\n  " << k << ": " << v.get<std::string>();
        if (command == "eval")
            std::cout << "\n  success rate: " << out.summary["success_rate"] << "\n  mean ER: " << out.summary["mean"];
        if (command == "probe")
            for (const auto& row : out.summary["variants"])
                std::cout << "\n  " << row["label"].get<std::string>() << ": sparse " << row["sparse_rms"]
                          << ", non-local " << row["nonlocal_rms"];
        std::cout << '\n';
    }
    return kOk;
}

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Io: return kUnreadableInput;
        case ErrorKind::DegenerateData:
        case ErrorKind::DegenerateGradient: return kDegenerateImage;
        case ErrorKind::Format: return kMalformedKernel;
        default: return kFailure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return run(args, 0);
    } catch (const ExitError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
}
