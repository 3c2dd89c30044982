#pragma once

#include <vector>

#include <Eigen/Dense>

#include "deblur/image.hpp"
#include "deblur/patches.hpp"

namespace deblur {

struct Neighbor {
    PatchIndex index;       // center in the down-scaled target
    double distance = 0.0;  // squared Euclidean patch distance
};

struct NeighborSet {
    PatchIndex query;
    std::vector<Neighbor> neighbors;  // ascending distance, raster order on ties
    std::vector<double> weights;      // convex combination, aligned with neighbors
};

enum class SearchMode { Exact, Approximate };

// All patches of a target image, ordered along their principal axis. The
// projection gap to a query lower-bounds the true distance, so the exact walk
// can stop early; the approximate walk additionally stops after a fixed
// number of full distance evaluations. Immutable after construction.
class PatchSearchIndex {
public:
    PatchSearchIndex(const Image& target, int side);

    int side() const noexcept { return side_; }
    std::size_t size() const noexcept { return centers_.size(); }
    const std::vector<PatchIndex>& centers() const noexcept { return centers_; }
    const PatchMatrix& patches() const noexcept { return patches_; }

    std::vector<Neighbor> search(const Eigen::Ref<const Eigen::VectorXd>& query, int p, SearchMode mode,
                                 int candidate_budget = 256) const;

private:
    int side_;
    std::vector<PatchIndex> centers_;
    PatchMatrix patches_;
    Eigen::VectorXd axis_;
    std::vector<double> projection_;  // sorted ascending
    std::vector<int> order_;          // patch id for each sorted slot
};

// Convenience wrapper that builds a one-off index.
std::vector<Neighbor> nn_search(const Eigen::Ref<const Eigen::VectorXd>& query, const Image& target, int side, int p,
                                SearchMode mode = SearchMode::Exact);

// w_i proportional to exp(-|query - neighbor_i|^2 / h_w), summing to one.
std::vector<double> nl_weights(const Eigen::Ref<const Eigen::VectorXd>& query, const PatchMatrix& neighbors, double h_w);
std::vector<double> nl_weights_from_distances(const std::vector<double>& distances, double h_w);

// sum_i w_i R_i(target).
Eigen::VectorXd nl_predict(const NeighborSet& set, const Image& target, int side);

}  // namespace deblur
