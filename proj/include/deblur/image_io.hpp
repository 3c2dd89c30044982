#pragma once

#include <filesystem>

#include "deblur/image.hpp"

namespace deblur {

// Loads PNG or PGM/PPM (8- or 16-bit) into [0,1] doubles. Alpha is dropped;
// gray+alpha becomes 1 channel, RGB(A) becomes 3. Throws Io on failure.
Image read_image(const std::filesystem::path& path);

// Writes by extension: .png (8 or 16 bits), .pgm/.ppm (binary). Values are
// clamped to [0,1] and rounded.
void write_image(const std::filesystem::path& path, const Image& image, int bit_depth = 8);

}  // namespace deblur
