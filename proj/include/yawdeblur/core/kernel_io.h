#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "yawdeblur/core/kernel.h"

namespace yawdeblur {

// Text format:
//   PSF <size_x> <size_y>
//   <size_x weights>      (size_y lines)
// Weights are written with 17 significant digits so a round trip is exact
// to double precision. The parser re-normalizes.
std::string FormatKernel(const Kernel& kernel);
Kernel ParseKernel(std::string_view text);

Kernel LoadKernel(const std::filesystem::path& path);
void SaveKernel(const Kernel& kernel, const std::filesystem::path& path);

}  // namespace yawdeblur
