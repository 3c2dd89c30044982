#include "deblur/patches.hpp"

#include "deblur/error.hpp"

namespace deblur {

bool patch_in_bounds(int width, int height, int side, PatchIndex p) noexcept {
    const int h = side / 2;
    return p.x - h >= 0 && p.y - h >= 0 && p.x + h < width && p.y + h < height;
}

std::vector<PatchIndex> all_patch_centers(int width, int height, int side) {
    return strided_patch_centers(width, height, side, 1);
}

std::vector<PatchIndex> strided_patch_centers(int width, int height, int side, int stride) {
    if (stride < 1) throw Error(ErrorKind::Parameter, "patch stride must be positive");
    std::vector<PatchIndex> out;
    const int h = side / 2;
    for (int y = h; y + h < height; y += stride)
        for (int x = h; x + h < width; x += stride) out.push_back({x, y});
    return out;
}

void extract_patch(const Image& image, int side, PatchIndex p, Eigen::Ref<Eigen::VectorXd> out) {
    const int h = side / 2;
    int k = 0;
    for (int dy = -h; dy <= h; ++dy)
        for (int dx = -h; dx <= h; ++dx) out[k++] = image(p.x + dx, p.y + dy);
}

PatchMatrix extract_patches(const Image& image, int side, const std::vector<PatchIndex>& indices) {
    if (image.channels() != 1) throw Error(ErrorKind::Channel, "patch extraction expects a single channel");
    if (side < 1 || side % 2 == 0) throw Error(ErrorKind::Parameter, "patch side must be odd");
    PatchMatrix out(side * side, static_cast<Eigen::Index>(indices.size()));
    for (std::size_t j = 0; j < indices.size(); ++j) {
        if (!patch_in_bounds(image.width(), image.height(), side, indices[j])) {
            throw Error(ErrorKind::Index, "patch centered at (" + std::to_string(indices[j].x) + "," +
                                              std::to_string(indices[j].y) + ") leaves the image");
        }
        extract_patch(image, side, indices[j], out.col(static_cast<Eigen::Index>(j)));
    }
    return out;
}

PatchAccumulation accumulate_patches(const PatchMatrix& patches, const std::vector<PatchIndex>& indices, int width,
                                     int height, int side) {
    if (patches.rows() != side * side || patches.cols() != static_cast<Eigen::Index>(indices.size())) {
        throw Error(ErrorKind::Shape, "patch matrix does not match indices and patch side");
    }
    PatchAccumulation acc{Image(width, height), Image(width, height)};
    const int h = side / 2;
    for (std::size_t j = 0; j < indices.size(); ++j) {
        const PatchIndex p = indices[j];
        if (!patch_in_bounds(width, height, side, p)) throw Error(ErrorKind::Index, "patch leaves the image");
        int k = 0;
        for (int dy = -h; dy <= h; ++dy)
            for (int dx = -h; dx <= h; ++dx) {
                acc.sum(p.x + dx, p.y + dy) += patches(k++, static_cast<Eigen::Index>(j));
                acc.coverage(p.x + dx, p.y + dy) += 1.0;
            }
    }
    return acc;
}

}  // namespace deblur
