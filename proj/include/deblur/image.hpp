#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace deblur {

// Planar multi-channel image of doubles; nominal intensity range [0,1].
// Storage is row-major within each channel plane.
class Image {
public:
    Image() = default;
    Image(int width, int height, int channels = 1, double fill = 0.0);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    std::size_t plane_size() const noexcept {
        return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
    }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }
    bool same_shape(const Image& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
    }

    double& operator()(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }
    double operator()(int x, int y, int c = 0) const noexcept { return data_[index(x, y, c)]; }

    // Periodic access: coordinates wrap around the image.
    double wrapped(int x, int y, int c = 0) const noexcept;
    // Replicate access: coordinates clamp to the nearest border pixel.
    double clamped(int x, int y, int c = 0) const noexcept;

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }
    std::span<double> plane(int c) noexcept { return {data_.data() + c * plane_size(), plane_size()}; }
    std::span<const double> plane(int c) const noexcept {
        return {data_.data() + c * plane_size(), plane_size()};
    }

    Image channel(int c) const;
    void set_channel(int c, const Image& plane);

    double mean() const;
    double min() const;
    double max() const;
    bool all_finite() const;

    Image& clamp(double lo = 0.0, double hi = 1.0);

private:
    std::size_t index(int x, int y, int c) const noexcept {
        return static_cast<std::size_t>(c) * plane_size() +
               static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<double> data_;
};

// Rec. 601 luma for 3-channel input; single-channel input is returned as is.
Image to_gray(const Image& image);

double dot(const Image& a, const Image& b);
double squared_distance(const Image& a, const Image& b);
double max_abs_difference(const Image& a, const Image& b);

}  // namespace deblur
