#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "deblur/image.hpp"

namespace deblur {

// A patch is addressed by its center pixel; the full side x side footprint
// must lie inside the image.
struct PatchIndex {
    int x = 0;
    int y = 0;
    friend bool operator==(const PatchIndex&, const PatchIndex&) = default;
};

// One vectorized patch per column, raster order (rows of the patch, left to
// right) within each column.
using PatchMatrix = Eigen::MatrixXd;

bool patch_in_bounds(int width, int height, int side, PatchIndex p) noexcept;

// Every center whose footprint fits, in raster order.
std::vector<PatchIndex> all_patch_centers(int width, int height, int side);
// Centers on a regular grid with the given stride (stride 1 = all centers).
std::vector<PatchIndex> strided_patch_centers(int width, int height, int side, int stride);

void extract_patch(const Image& image, int side, PatchIndex p, Eigen::Ref<Eigen::VectorXd> out);
PatchMatrix extract_patches(const Image& image, int side, const std::vector<PatchIndex>& indices);

struct PatchAccumulation {
    Image sum;       // sum_j Q_j^T p_j
    Image coverage;  // sum_j Q_j^T Q_j, as a per-pixel count
};

// Adjoint of extract_patches.
PatchAccumulation accumulate_patches(const PatchMatrix& patches, const std::vector<PatchIndex>& indices, int width,
                                     int height, int side);

}  // namespace deblur
