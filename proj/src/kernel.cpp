#include "deblur/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "deblur/error.hpp"

namespace deblur {

Kernel::Kernel(int size, double fill) : size_(size) {
    if (size <= 0 || size % 2 == 0) throw Error(ErrorKind::Dimension, "kernel size must be odd and positive");
    weights_.assign(static_cast<std::size_t>(size) * size, fill);
}

Kernel::Kernel(int size, std::vector<double> weights) : Kernel(size) {
    if (weights.size() != weights_.size()) throw Error(ErrorKind::Shape, "kernel weight count mismatch");
    weights_ = std::move(weights);
}

Kernel Kernel::delta(int size) {
    Kernel k(size);
    k(k.radius(), k.radius()) = 1.0;
    return k;
}

Kernel Kernel::box(int n) {
    if (n <= 0) throw Error(ErrorKind::Parameter, "box size must be positive");
    const int size = n % 2 == 1 ? n : n + 1;
    Kernel k(size);
    const double w = 1.0 / (static_cast<double>(n) * n);
    for (int v = 0; v < n; ++v)
        for (int u = 0; u < n; ++u) k(u, v) = w;
    return k;
}

double Kernel::at_offset(int dx, int dy) const noexcept {
    const int u = dx + radius(), v = dy + radius();
    if (u < 0 || v < 0 || u >= size_ || v >= size_) return 0.0;
    return (*this)(u, v);
}

double Kernel::sum() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }
double Kernel::max() const { return *std::max_element(weights_.begin(), weights_.end()); }
double Kernel::norm() const {
    return std::sqrt(std::inner_product(weights_.begin(), weights_.end(), weights_.begin(), 0.0));
}

bool Kernel::is_normalized(double tol) const {
    return std::all_of(weights_.begin(), weights_.end(), [](double w) { return w >= 0.0 && std::isfinite(w); }) &&
           std::abs(sum() - 1.0) <= tol;
}

bool Kernel::is_delta() const {
    for (int v = 0; v < size_; ++v)
        for (int u = 0; u < size_; ++u) {
            const double expect = (u == radius() && v == radius()) ? 1.0 : 0.0;
            if ((*this)(u, v) != expect) return false;
        }
    return true;
}

Kernel Kernel::resized(int new_size) const {
    Kernel out(new_size);
    const int r = out.radius();
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) out(dx + r, dy + r) = at_offset(dx, dy);
    return out;
}

Kernel Kernel::centered() const {
    double total = 0.0, mx = 0.0, my = 0.0;
    for (int v = 0; v < size_; ++v)
        for (int u = 0; u < size_; ++u) {
            const double w = (*this)(u, v);
            total += w;
            mx += w * (u - radius());
            my += w * (v - radius());
        }
    if (total <= 0.0) return *this;
    const int sx = static_cast<int>(std::lround(mx / total));
    const int sy = static_cast<int>(std::lround(my / total));
    if (sx == 0 && sy == 0) return *this;
    Kernel out(size_);
    for (int v = 0; v < size_; ++v)
        for (int u = 0; u < size_; ++u) {
            const int su = u + sx, sv = v + sy;
            if (su >= 0 && sv >= 0 && su < size_ && sv < size_) out(u, v) = (*this)(su, sv);
        }
    return out;
}

Kernel Kernel::subpixel_centered() const {
    double total = 0.0, mx = 0.0, my = 0.0;
    for (int v = 0; v < size_; ++v)
        for (int u = 0; u < size_; ++u) {
            const double w = (*this)(u, v);
            total += w;
            mx += w * (u - radius());
            my += w * (v - radius());
        }
    if (total <= 0.0) return *this;
    mx /= total;
    my /= total;
    if (mx == 0.0 && my == 0.0) return *this;
    const auto tap = [&](int u, int v) { return u < 0 || v < 0 || u >= size_ || v >= size_ ? 0.0 : (*this)(u, v); };
    Kernel out(size_);
    for (int v = 0; v < size_; ++v)
        for (int u = 0; u < size_; ++u) {
            const double su = u + mx, sv = v + my;
            const int u0 = static_cast<int>(std::floor(su)), v0 = static_cast<int>(std::floor(sv));
            const double fu = su - u0, fv = sv - v0;
            out(u, v) = (1 - fu) * (1 - fv) * tap(u0, v0) + fu * (1 - fv) * tap(u0 + 1, v0) +
                        (1 - fu) * fv * tap(u0, v0 + 1) + fu * fv * tap(u0 + 1, v0 + 1);
        }
    return out;
}

Kernel drop_weak_components(const Kernel& in, double fraction, double support) {
    Kernel k = in;
    const double cut = support * k.max();
    for (double& w : k.weights())
        if (w < cut) w = 0.0;
    const int n = k.size();
    std::vector<int> label(static_cast<std::size_t>(n) * n, -1);
    std::vector<double> mass;
    std::vector<int> stack;
    for (int s = 0; s < n * n; ++s) {
        if (label[s] >= 0 || !(k(s % n, s / n) > 0.0)) continue;
        const int id = static_cast<int>(mass.size());
        mass.push_back(0.0);
        label[s] = id;
        stack.assign(1, s);
        while (!stack.empty()) {
            const int p = stack.back();
            stack.pop_back();
            const int u = p % n, v = p / n;
            mass[id] += k(u, v);
            for (int dv = -1; dv <= 1; ++dv)
                for (int du = -1; du <= 1; ++du) {
                    const int uu = u + du, vv = v + dv;
                    if (uu < 0 || vv < 0 || uu >= n || vv >= n) continue;
                    const int q = vv * n + uu;
                    if (label[q] < 0 && k(uu, vv) > 0.0) {
                        label[q] = id;
                        stack.push_back(q);
                    }
                }
        }
    }
    if (mass.size() < 2) return support > 0.0 ? project_kernel(k, 0.0) : k;
    const double heaviest = *std::max_element(mass.begin(), mass.end());
    Kernel out = k;
    for (int s = 0; s < n * n; ++s)
        if (label[s] >= 0 && mass[label[s]] < fraction * heaviest) out(s % n, s / n) = 0.0;
    return project_kernel(out, 0.0);
}

Kernel project_kernel(Kernel k, double floor_fraction) {
    for (double& w : k.weights())
        if (!(w > 0.0)) w = 0.0;  // also scrubs NaN
    const double peak = k.max();
    if (!(peak > 0.0) || !std::isfinite(peak)) {
        throw Error(ErrorKind::DegenerateGradient, "kernel projection: no positive taps");
    }
    const double floor = floor_fraction * peak;
    for (double& w : k.weights())
        if (w < floor) w = 0.0;
    const double s = k.sum();
    for (double& w : k.weights()) w /= s;
    return k;
}

double normalized_correlation(const Kernel& a, const Kernel& b) {
    const int size = std::max(a.size(), b.size());
    const Kernel pa = a.resized(size), pb = b.resized(size);
    const double na = pa.norm(), nb = pb.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::inner_product(pa.weights().begin(), pa.weights().end(), pb.weights().begin(), 0.0) / (na * nb);
}

int round_up_to_odd(double v) {
    int n = static_cast<int>(std::ceil(v - 1e-9));
    if (n < 1) n = 1;
    return n % 2 == 0 ? n + 1 : n;
}

}  // namespace deblur
