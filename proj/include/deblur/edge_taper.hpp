#pragma once

#include "deblur/image.hpp"
#include "deblur/kernel.hpp"

namespace deblur {

// Blends the border band of each channel toward its periodically blurred
// version. The blend weight along each axis is one minus the normalized
// autocorrelation of the kernel's projection onto that axis, so pixels more
// than kernel.size() from every border are returned untouched.
Image edge_taper(const Image& image, const Kernel& kernel);

}  // namespace deblur
