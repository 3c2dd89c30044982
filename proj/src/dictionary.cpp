#include "deblur/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>

#include "deblur/error.hpp"
#include "deblur/parallel.hpp"

namespace deblur {
namespace {

constexpr double kResidualFloor = 1e-12;

// Draws in [0, bound) from raw engine output so sequences do not depend on
// the standard library's distribution implementation.
std::size_t draw_below(std::mt19937_64& rng, std::size_t bound) { return static_cast<std::size_t>(rng() % bound); }

double draw_normal(std::mt19937_64& rng) {
    constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
    const double u1 = ((rng() >> 11) + 0.5) * scale;
    const double u2 = ((rng() >> 11) + 0.5) * scale;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

bool nearly_parallel(const Eigen::MatrixXd& atoms, int filled, const Eigen::VectorXd& candidate) {
    for (int k = 0; k < filled; ++k)
        if (std::abs(atoms.col(k).dot(candidate)) >= 1.0 - 1e-8) return true;
    return false;
}

Eigen::MatrixXd initial_atoms(const PatchMatrix& samples, int t, std::mt19937_64& rng) {
    const Eigen::Index m = samples.cols();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[draw_below(rng, i)]);

    Eigen::MatrixXd atoms(samples.rows(), t);
    int filled = 0;
    for (Eigen::Index idx : order) {
        if (filled == t) break;
        const double norm = samples.col(idx).norm();
        if (norm == 0.0) continue;
        Eigen::VectorXd cand = samples.col(idx) / norm;
        if (nearly_parallel(atoms, filled, cand)) continue;
        atoms.col(filled++) = cand;
    }
    while (filled < t) {
        Eigen::VectorXd cand(samples.rows());
        for (Eigen::Index i = 0; i < cand.size(); ++i) cand[i] = draw_normal(rng);
        cand.normalize();
        if (nearly_parallel(atoms, filled, cand)) continue;
        atoms.col(filled++) = cand;
    }
    return atoms;
}

}  // namespace

SparseCode omp_encode(const Dictionary& dict, const Eigen::Ref<const Eigen::VectorXd>& patch, int sparsity) {
    if (patch.size() != dict.n()) throw Error(ErrorKind::Shape, "patch dimension does not match the dictionary");
    SparseCode code;
    Eigen::VectorXd residual = patch;
    code.residual_norms.push_back(residual.norm());
    const int limit = std::min({sparsity, dict.n(), dict.t()});
    std::vector<char> used(static_cast<std::size_t>(dict.t()), 0);
    Eigen::MatrixXd sub(dict.n(), 0);

    while (static_cast<int>(code.support.size()) < limit && code.residual_norms.back() >= kResidualFloor) {
        const Eigen::VectorXd corr = dict.atoms.transpose() * residual;
        int best = -1;
        double best_abs = 0.0;
        for (int k = 0; k < dict.t(); ++k) {
            if (used[static_cast<std::size_t>(k)]) continue;
            const double a = std::abs(corr[k]);
            if (a > best_abs) {
                best_abs = a;
                best = k;
            }
        }
        if (best < 0 || best_abs < 1e-14) break;
        used[static_cast<std::size_t>(best)] = 1;
        code.support.push_back(best);
        sub.conservativeResize(Eigen::NoChange, sub.cols() + 1);
        sub.col(sub.cols() - 1) = dict.atoms.col(best);
        const Eigen::VectorXd coeffs = sub.colPivHouseholderQr().solve(patch);
        residual = patch - sub * coeffs;
        code.coeffs.assign(coeffs.data(), coeffs.data() + coeffs.size());
        code.residual_norms.push_back(residual.norm());
    }
    return code;
}

Eigen::VectorXd reconstruct(const Dictionary& dict, const SparseCode& code) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dict.n());
    for (std::size_t i = 0; i < code.support.size(); ++i) out += code.coeffs[i] * dict.atoms.col(code.support[i]);
    return out;
}

KsvdResult ksvd_train(const PatchMatrix& samples, int t, int sparsity, int iterations, std::uint64_t seed) {
    const Eigen::Index m = samples.cols();
    const int n = static_cast<int>(samples.rows());
    if (t < 1 || sparsity < 1) throw Error(ErrorKind::Parameter, "atom count and sparsity must be positive");
    if (m < t) {
        throw Error(ErrorKind::TrainingData,
                    std::to_string(m) + " samples cannot train " + std::to_string(t) + " atoms");
    }
    if (samples.cwiseAbs().maxCoeff() == 0.0) throw Error(ErrorKind::DegenerateData, "all training samples are zero");

    std::mt19937_64 rng(seed);
    KsvdResult result;
    Dictionary& dict = result.dictionary;
    dict.atoms = initial_atoms(samples, t, rng);

    std::vector<SparseCode> codes(static_cast<std::size_t>(m));
    Eigen::MatrixXd residual(n, m);
    auto code_all = [&](bool keep_better_previous) {
        parallel_for(static_cast<std::size_t>(m), [&](std::size_t i) {
            const auto col = static_cast<Eigen::Index>(i);
            SparseCode fresh = omp_encode(dict, samples.col(col), sparsity);
            Eigen::VectorXd r = samples.col(col) - reconstruct(dict, fresh);
            if (keep_better_previous && residual.col(col).squaredNorm() <= r.squaredNorm()) return;
            codes[i] = std::move(fresh);
            residual.col(col) = r;
        });
    };

    code_all(false);
    result.objective.push_back(residual.squaredNorm());

    for (int sweep = 0; sweep < iterations; ++sweep) {
        if (sweep > 0) code_all(true);

        std::vector<std::vector<std::pair<Eigen::Index, std::size_t>>> users(static_cast<std::size_t>(t));
        for (Eigen::Index i = 0; i < m; ++i) {
            const auto& c = codes[static_cast<std::size_t>(i)];
            for (std::size_t s = 0; s < c.support.size(); ++s) users[static_cast<std::size_t>(c.support[s])].push_back({i, s});
        }

        std::vector<char> replaced_from(static_cast<std::size_t>(m), 0);
        for (int k = 0; k < t; ++k) {
            const auto& who = users[static_cast<std::size_t>(k)];
            if (who.empty()) {
                // Unused atom: swap in the worst-represented sample. Codes do
                // not reference atom k, so the objective is unchanged.
                Eigen::Index worst = -1;
                double worst_err = 0.0;
                for (Eigen::Index i = 0; i < m; ++i) {
                    if (replaced_from[static_cast<std::size_t>(i)]) continue;
                    const double e = residual.col(i).squaredNorm();
                    if (e > worst_err) {
                        worst_err = e;
                        worst = i;
                    }
                }
                if (worst < 0) continue;
                Eigen::VectorXd cand = samples.col(worst);
                const double norm = cand.norm();
                if (norm == 0.0) continue;
                cand /= norm;
                bool duplicate = false;
                for (int j = 0; j < t && !duplicate; ++j)
                    duplicate = j != k && std::abs(dict.atoms.col(j).dot(cand)) >= 1.0 - 1e-8;
                replaced_from[static_cast<std::size_t>(worst)] = 1;
                if (!duplicate) dict.atoms.col(k) = cand;
                continue;
            }

            const Eigen::Index count = static_cast<Eigen::Index>(who.size());
            Eigen::MatrixXd err(n, count);
            for (Eigen::Index j = 0; j < count; ++j) {
                const auto [i, slot] = who[static_cast<std::size_t>(j)];
                err.col(j) = residual.col(i) + codes[static_cast<std::size_t>(i)].coeffs[slot] * dict.atoms.col(k);
            }
            const Eigen::MatrixXd gram = err * err.transpose();
            if (gram.trace() == 0.0) continue;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
            Eigen::VectorXd atom = eig.eigenvectors().col(n - 1);
            Eigen::Index pivot = 0;
            atom.cwiseAbs().maxCoeff(&pivot);
            if (atom[pivot] < 0) atom = -atom;
            dict.atoms.col(k) = atom;
            const Eigen::VectorXd coeffs = err.transpose() * atom;
            for (Eigen::Index j = 0; j < count; ++j) {
                const auto [i, slot] = who[static_cast<std::size_t>(j)];
                codes[static_cast<std::size_t>(i)].coeffs[slot] = coeffs[j];
                residual.col(i) = err.col(j) - coeffs[j] * atom;
            }
        }
        result.objective.push_back(residual.squaredNorm());
    }
    return result;
}

void write_dictionary(std::ostream& out, const Dictionary& dict) {
    out << dict.n() << ' ' << dict.t() << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (int k = 0; k < dict.t(); ++k) {
        for (int i = 0; i < dict.n(); ++i) out << (i ? " " : "") << dict.atoms(i, k);
        out << '\n';
    }
}

Dictionary read_dictionary(std::istream& in) {
    int n = 0, t = 0;
    if (!(in >> n >> t) || n <= 0 || t <= 0) throw Error(ErrorKind::Io, "malformed dictionary header");
    Dictionary d;
    d.atoms.resize(n, t);
    for (int k = 0; k < t; ++k)
        for (int i = 0; i < n; ++i)
            if (!(in >> d.atoms(i, k))) throw Error(ErrorKind::Io, "truncated dictionary data");
    return d;
}

void save_dictionary(const std::filesystem::path& path, const Dictionary& dict) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    write_dictionary(out, dict);
}

Dictionary load_dictionary(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    return read_dictionary(in);
}

}  // namespace deblur
