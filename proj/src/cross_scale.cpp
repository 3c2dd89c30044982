#include "deblur/cross_scale.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "deblur/error.hpp"

namespace deblur {
namespace {

struct Candidate {
    double distance;
    int id;  // raster position in the target
    bool operator<(const Candidate& o) const { return distance < o.distance || (distance == o.distance && id < o.id); }
};

// Keeps the p best candidates; `worst()` is the admission bound.
class BestList {
public:
    explicit BestList(int p) : p_(p) {}
    bool full() const { return static_cast<int>(items_.size()) == p_; }
    double worst() const { return items_.front().distance; }
    void offer(Candidate c) {
        if (!full()) {
            items_.push_back(c);
            std::push_heap(items_.begin(), items_.end());
        } else if (c < items_.front()) {
            std::pop_heap(items_.begin(), items_.end());
            items_.back() = c;
            std::push_heap(items_.begin(), items_.end());
        }
    }
    std::vector<Candidate> sorted() const {
        auto out = items_;
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    int p_;
    std::vector<Candidate> items_;  // max-heap on (distance, id)
};

}  // namespace

PatchSearchIndex::PatchSearchIndex(const Image& target, int side)
    : side_(side), centers_(all_patch_centers(target.width(), target.height(), side)) {
    if (centers_.empty()) throw Error(ErrorKind::Count, "target holds no complete patch");
    patches_ = extract_patches(target, side, centers_);
    const Eigen::VectorXd mean = patches_.rowwise().mean();
    const Eigen::MatrixXd centered = patches_.colwise() - mean;
    const Eigen::MatrixXd cov = centered * centered.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    axis_ = eig.eigenvectors().col(cov.rows() - 1);

    const Eigen::VectorXd proj = patches_.transpose() * axis_;
    order_.resize(centers_.size());
    std::iota(order_.begin(), order_.end(), 0);
    std::sort(order_.begin(), order_.end(), [&](int a, int b) { return proj[a] < proj[b] || (proj[a] == proj[b] && a < b); });
    projection_.resize(order_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) projection_[i] = proj[order_[i]];
}

std::vector<Neighbor> PatchSearchIndex::search(const Eigen::Ref<const Eigen::VectorXd>& query, int p, SearchMode mode,
                                               int candidate_budget) const {
    if (query.size() != patches_.rows()) throw Error(ErrorKind::Shape, "query dimension does not match patch side");
    if (p < 1 || static_cast<std::size_t>(p) > centers_.size()) {
        throw Error(ErrorKind::Count, "requested " + std::to_string(p) + " neighbors from " +
                                          std::to_string(centers_.size()) + " patches");
    }
    const double qproj = axis_.dot(query);
    BestList best(p);
    const auto n = static_cast<std::ptrdiff_t>(order_.size());
    std::ptrdiff_t hi = std::lower_bound(projection_.begin(), projection_.end(), qproj) - projection_.begin();
    std::ptrdiff_t lo = hi - 1;
    int evaluated = 0;
    const Eigen::Index dim = patches_.rows();

    while (lo >= 0 || hi < n) {
        const double gap_lo = lo >= 0 ? qproj - projection_[lo] : INFINITY;
        const double gap_hi = hi < n ? projection_[hi] - qproj : INFINITY;
        const bool take_lo = gap_lo <= gap_hi;
        const double gap = take_lo ? gap_lo : gap_hi;
        // The projection gap never exceeds the true distance; the slack covers rounding.
        if (best.full() && gap * gap > best.worst() * (1.0 + 1e-9) + 1e-18) break;
        if (mode == SearchMode::Approximate && evaluated >= candidate_budget && best.full()) break;
        const int id = order_[static_cast<std::size_t>(take_lo ? lo-- : hi++)];

        const double bound = best.full() ? best.worst() : INFINITY;
        double d = 0.0;
        for (Eigen::Index k = 0; k < dim && d <= bound; ++k) {
            const double diff = query[k] - patches_(k, id);
            d += diff * diff;
        }
        ++evaluated;
        if (d <= bound) best.offer({d, id});
    }

    std::vector<Neighbor> out;
    for (const Candidate& c : best.sorted()) out.push_back({centers_[static_cast<std::size_t>(c.id)], c.distance});
    return out;
}

std::vector<Neighbor> nn_search(const Eigen::Ref<const Eigen::VectorXd>& query, const Image& target, int side, int p,
                                SearchMode mode) {
    return PatchSearchIndex(target, side).search(query, p, mode);
}

std::vector<double> nl_weights_from_distances(const std::vector<double>& distances, double h_w) {
    if (!(h_w > 0.0)) throw Error(ErrorKind::Parameter, "non-local weight decay must be positive");
    if (distances.empty()) throw Error(ErrorKind::Count, "non-local weights need at least one neighbor");
    const double dmin = *std::min_element(distances.begin(), distances.end());
    std::vector<double> w(distances.size());
    double total = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = std::exp(-(distances[i] - dmin) / h_w);
        total += w[i];
    }
    for (double& v : w) v /= total;
    return w;
}

std::vector<double> nl_weights(const Eigen::Ref<const Eigen::VectorXd>& query, const PatchMatrix& neighbors, double h_w) {
    if (neighbors.rows() != query.size()) throw Error(ErrorKind::Shape, "neighbor patches do not match the query");
    std::vector<double> d(static_cast<std::size_t>(neighbors.cols()));
    for (Eigen::Index i = 0; i < neighbors.cols(); ++i) d[static_cast<std::size_t>(i)] = (neighbors.col(i) - query).squaredNorm();
    return nl_weights_from_distances(d, h_w);
}

Eigen::VectorXd nl_predict(const NeighborSet& set, const Image& target, int side) {
    if (set.weights.size() != set.neighbors.size()) throw Error(ErrorKind::Shape, "weights do not match neighbors");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(side * side);
    Eigen::VectorXd patch(side * side);
    for (std::size_t i = 0; i < set.neighbors.size(); ++i) {
        extract_patch(target, side, set.neighbors[i].index, patch);
        out += set.weights[i] * patch;
    }
    return out;
}

}  // namespace deblur
