#pragma once


#include "yawdeblur/core/convolve.h"
#include "yawdeblur/core/error.h"
#include "yawdeblur/core/fft.h"
#include "yawdeblur/deconv/deconv.h"

namespace yawdeblur::internal {

inline constexpr int kMinPad = 32;

// The grid a frequency-domain solve runs on, and how to get back.
struct WorkingGrid {
  GrayImage image;
  int left = 0;
  int top = 0;
  int width = 0;   // original size
  int height = 0;

  GrayImage Restore(const GrayImage& solved) const {
    if (solved.width() == width && solved.height() == height) return solved;
    return solved.Crop(left, top, width, height);
  }
};

// Extends `image` to out_w x out_h (image at the origin) so the periodic
// grid has no seam: the pad cross-fades linearly from the mirror of the
// far edge to the mirror of the near edge it wraps onto.
inline GrayImage SeamlessPad(const GrayImage& image, int out_w, int out_h) {
  const int w = image.width();
  const int h = image.height();
  auto mirror = [](int i, int n) { return BoundaryIndex(i, n, Boundary::kSymmetric); };
  GrayImage rows(out_w, h);
  const int px = out_w - w;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) rows.at(x, y) = image.at(x, y);
    for (int j = 0; j < px; ++j) {
      const double t = (j + 0.5) / px;
      const double far = image.at(mirror(w + j, w), y);
      const double near = image.at(mirror(j - px, w), y);
      rows.at(w + j, y) = (1.0 - t) * far + t * near;
    }
  }
  GrayImage out(out_w, out_h);
  const int py = out_h - h;
  for (int x = 0; x < out_w; ++x) {
    for (int y = 0; y < h; ++y) out.at(x, y) = rows.at(x, y);
    for (int j = 0; j < py; ++j) {
      const double t = (j + 0.5) / py;
      const double far = rows.at(x, mirror(h + j, h));
      const double near = rows.at(x, mirror(j - py, h));
      out.at(x, h + j) = (1.0 - t) * far + t * near;
    }
  }
  return out;
}

inline WorkingGrid MakeWorkingGrid(const GrayImage& image, const Kernel& kernel,
                                   SolveBoundary boundary) {
  Require(kernel.size_x() <= image.width() && kernel.size_y() <= image.height(),
          "kernel larger than image");
  WorkingGrid grid;
  grid.width = image.width();
  grid.height = image.height();
  if (boundary == SolveBoundary::kPeriodic) {
    grid.image = image;
    return grid;
  }
  // The pad must be long compared with the kernel so the cross-fade looks
  // locally like a mirrored image to the blur model.
  const int mx = std::max(4 * kernel.radius_x(), kMinPad);
  const int my = std::max(4 * kernel.radius_y(), kMinPad);
  grid.image = SeamlessPad(image, fft::NextFastSize(image.width() + mx),
                           fft::NextFastSize(image.height() + my));
  return grid;
}

}  // namespace yawdeblur::internal
