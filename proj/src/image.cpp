#include "deblur/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "deblur/error.hpp"

namespace deblur {
namespace {

int wrap(int v, int n) {
    v %= n;
    return v < 0 ? v + n : v;
}

void require_same_shape(const Image& a, const Image& b, const char* what) {
    if (!a.same_shape(b)) throw Error(ErrorKind::Dimension, std::string(what) + ": image shapes differ");
}

}  // namespace

Image::Image(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
    if (width <= 0 || height <= 0 || channels <= 0) {
        throw Error(ErrorKind::Dimension, "image dimensions must be positive");
    }
    data_.assign(plane_size() * static_cast<std::size_t>(channels), fill);
}

double Image::wrapped(int x, int y, int c) const noexcept {
    return (*this)(wrap(x, width_), wrap(y, height_), c);
}

double Image::clamped(int x, int y, int c) const noexcept {
    return (*this)(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1), c);
}

Image Image::channel(int c) const {
    if (c < 0 || c >= channels_) throw Error(ErrorKind::Channel, "channel index out of range");
    Image out(width_, height_, 1);
    auto src = plane(c);
    std::copy(src.begin(), src.end(), out.data().begin());
    return out;
}

void Image::set_channel(int c, const Image& p) {
    if (c < 0 || c >= channels_ || p.channels() != 1 || p.width() != width_ || p.height() != height_) {
        throw Error(ErrorKind::Channel, "set_channel: incompatible plane");
    }
    std::copy(p.data().begin(), p.data().end(), plane(c).begin());
}

double Image::mean() const {
    if (data_.empty()) return 0.0;
    return std::accumulate(data_.begin(), data_.end(), 0.0) / static_cast<double>(data_.size());
}

double Image::min() const { return *std::min_element(data_.begin(), data_.end()); }
double Image::max() const { return *std::max_element(data_.begin(), data_.end()); }

bool Image::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Image& Image::clamp(double lo, double hi) {
    for (double& v : data_) v = std::clamp(v, lo, hi);
    return *this;
}

Image to_gray(const Image& image) {
    if (image.channels() == 1) return image;
    if (image.channels() != 3) throw Error(ErrorKind::Channel, "gray conversion expects 1 or 3 channels");
    Image out(image.width(), image.height(), 1);
    auto r = image.plane(0), g = image.plane(1), b = image.plane(2);
    auto dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
    return out;
}

double dot(const Image& a, const Image& b) {
    require_same_shape(a, b, "dot");
    return std::inner_product(a.data().begin(), a.data().end(), b.data().begin(), 0.0);
}

double squared_distance(const Image& a, const Image& b) {
    require_same_shape(a, b, "squared_distance");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a.data()[i] - b.data()[i];
        s += d * d;
    }
    return s;
}

double max_abs_difference(const Image& a, const Image& b) {
    require_same_shape(a, b, "max_abs_difference");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

}  // namespace deblur
