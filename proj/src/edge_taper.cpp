#include "deblur/edge_taper.hpp"

#include <algorithm>
#include <vector>

#include "deblur/filters.hpp"

namespace deblur {
namespace {

// alpha[i] for i in [0, n): 0 at the border, 1 once the lag exceeds the
// projection's support.
std::vector<double> taper_weights(const std::vector<double>& projection, int n) {
    const int len = static_cast<int>(projection.size());
    std::vector<double> autocorr(len, 0.0);
    for (int lag = 0; lag < len; ++lag)
        for (int i = 0; i + lag < len; ++i) autocorr[lag] += projection[i] * projection[i + lag];
    std::vector<double> alpha(n, 1.0);
    if (autocorr[0] <= 0.0) return alpha;
    for (int i = 0; i < n; ++i) {
        const int lag = std::min(i, n - 1 - i);
        if (lag < len) alpha[i] = 1.0 - autocorr[lag] / autocorr[0];
    }
    return alpha;
}

}  // namespace

Image edge_taper(const Image& image, const Kernel& kernel) {
    if (kernel.is_delta()) return image;
    const int s = kernel.size();
    std::vector<double> rows(s, 0.0), cols(s, 0.0);
    for (int v = 0; v < s; ++v)
        for (int u = 0; u < s; ++u) {
            cols[u] += kernel(u, v);
            rows[v] += kernel(u, v);
        }
    const auto ax = taper_weights(cols, image.width());
    const auto ay = taper_weights(rows, image.height());

    const Image blurred = conv2_fft(image, kernel);
    Image out = image;
    for (int c = 0; c < image.channels(); ++c)
        for (int y = 0; y < image.height(); ++y)
            for (int x = 0; x < image.width(); ++x) {
                const double alpha = ax[x] * ay[y];
                if (alpha == 1.0) continue;
                out(x, y, c) = alpha * image(x, y, c) + (1.0 - alpha) * blurred(x, y, c);
            }
    return out;
}

}  // namespace deblur
