#pragma once

#include <filesystem>
#include <iosfwd>

#include "deblur/kernel.hpp"

namespace deblur {

// Text format: first line holds the side length, followed by that many rows of
// whitespace-separated values written with 17 significant digits.
void write_kernel(std::ostream& out, const Kernel& kernel);
// Throws Format on malformed content. Kernels whose sum is off by more than
// 1e-6 are normalized with a warning.
Kernel read_kernel(std::istream& in);

void save_kernel(const std::filesystem::path& path, const Kernel& kernel);
Kernel load_kernel(const std::filesystem::path& path);

// 8-bit PNG scaled so the largest tap is white.
void save_kernel_image(const std::filesystem::path& path, const Kernel& kernel, int zoom = 4);

}  // namespace deblur
