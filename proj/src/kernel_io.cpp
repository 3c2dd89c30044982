#include "deblur/kernel_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "deblur/error.hpp"
#include "deblur/image.hpp"
#include "deblur/image_io.hpp"
#include "deblur/log.hpp"

namespace deblur {

void write_kernel(std::ostream& out, const Kernel& kernel) {
    out << kernel.size() << '\n' << std::setprecision(17);
    for (int v = 0; v < kernel.size(); ++v) {
        for (int u = 0; u < kernel.size(); ++u) out << (u ? " " : "") << kernel(u, v);
        out << '\n';
    }
}

Kernel read_kernel(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::Format, "kernel file is empty");
    std::istringstream head(line);
    int size = 0;
    std::string extra;
    if (!(head >> size) || (head >> extra)) throw Error(ErrorKind::Format, "kernel header must be a single size");
    if (size < 1 || size % 2 == 0 || size > 4095) throw Error(ErrorKind::Format, "kernel size must be odd and positive");
    Kernel k(size);
    for (int v = 0; v < size; ++v) {
        if (!std::getline(in, line)) throw Error(ErrorKind::Format, "kernel file ends after " + std::to_string(v) + " rows");
        std::istringstream row(line);
        for (int u = 0; u < size; ++u) {
            std::string tok;
            if (!(row >> tok)) throw Error(ErrorKind::Format, "kernel row " + std::to_string(v + 1) + " is short");
            std::size_t used = 0;
            double value = 0.0;
            try {
                value = std::stod(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok.size() || !std::isfinite(value))
                throw Error(ErrorKind::Format, "kernel entry '" + tok + "' is not a number");
            if (value < 0) throw Error(ErrorKind::Format, "kernel entries must be non-negative");
            k(u, v) = value;
        }
        if (row >> extra) throw Error(ErrorKind::Format, "kernel row " + std::to_string(v + 1) + " is too long");
    }
    while (std::getline(in, line))
        if (line.find_first_not_of(" \t\r") != std::string::npos)
            throw Error(ErrorKind::Format, "trailing content after kernel rows");
    const double sum = k.sum();
    if (!(sum > 0)) throw Error(ErrorKind::Format, "kernel sums to zero");
    if (std::abs(sum - 1.0) > 1e-6) log::warn("kernel sums to " + std::to_string(sum) + ", normalizing");
    for (double& w : k.weights()) w /= sum;
    return k;
}

void save_kernel(const std::filesystem::path& path, const Kernel& kernel) {
    std::ofstream f(path);
    if (!f) throw Error(ErrorKind::Io, "cannot write " + path.string());
    write_kernel(f, kernel);
}

Kernel load_kernel(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::Io, "cannot read " + path.string());
    return read_kernel(f);
}

void save_kernel_image(const std::filesystem::path& path, const Kernel& kernel, int zoom) {
    const double peak = kernel.max();
    Image img(kernel.size() * zoom, kernel.size() * zoom);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) img(x, y) = peak > 0 ? kernel(x / zoom, y / zoom) / peak : 0.0;
    write_image(path, img, 8);
}

}  // namespace deblur
