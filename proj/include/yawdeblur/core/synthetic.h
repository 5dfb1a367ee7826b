#pragma once

#include <cstdint>

#include "yawdeblur/core/image.h"

namespace yawdeblur {

// Deterministic piecewise-smooth test scene in [0.05, 0.95]: a shaded
// background, random rectangles and ellipses, thin line structures and a
// little fine texture. Stands in for real frames in benchmarks and tests.
GrayImage SyntheticScene(int width, int height, std::uint64_t seed);

}  // namespace yawdeblur
