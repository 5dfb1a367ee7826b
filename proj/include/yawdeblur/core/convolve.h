#pragma once

#include "yawdeblur/core/image.h"
#include "yawdeblur/core/kernel.h"

namespace yawdeblur {

enum class Boundary {
  kReplicate,  // clamp to the nearest edge pixel
  kSymmetric,  // mirror including the edge pixel: ... 1 0 | 0 1 2 ...
  kPeriodic,   // wrap around
};

// Maps an out-of-range index into [0, n).
int BoundaryIndex(int i, int n, Boundary boundary);

// Direct spatial convolution, output the size of `image`.
// Rejects kernels larger than the image in either dimension.
GrayImage Convolve(const GrayImage& image, const Kernel& kernel,
                   Boundary boundary = Boundary::kSymmetric);

// Frequency-domain convolution on the image's own periodic grid. Agrees with
// Convolve(..., Boundary::kPeriodic) to round-off.
GrayImage ConvolveFft(const GrayImage& image, const Kernel& kernel);

// Extends `image` by symmetric reflection to out_w x out_h, placing the
// original at (left, top).
GrayImage PadSymmetric(const GrayImage& image, int left, int top, int out_w,
                       int out_h);

// Periodic shift by (dx, dy): out(x + dx, y + dy) = in(x, y).
GrayImage CircularShift(const GrayImage& image, int dx, int dy);

}  // namespace yawdeblur
