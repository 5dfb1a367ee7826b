#include "yawdeblur/core/convolve.h"

#include <string>
#include <vector>

#include "yawdeblur/core/error.h"
#include "yawdeblur/core/fft.h"

namespace yawdeblur {

int BoundaryIndex(int i, int n, Boundary boundary) {
  if (i >= 0 && i < n) return i;
  switch (boundary) {
    case Boundary::kReplicate:
      return i < 0 ? 0 : n - 1;
    case Boundary::kPeriodic:
      return ((i % n) + n) % n;
    case Boundary::kSymmetric: {
      const int period = 2 * n;
      int m = ((i % period) + period) % period;
      return m < n ? m : period - 1 - m;
    }
  }
  return 0;
}

GrayImage Convolve(const GrayImage& image, const Kernel& kernel,
                   Boundary boundary) {
  Require(!image.empty(), "cannot convolve an empty image");
  Require(kernel.size_x() <= image.width() && kernel.size_y() <= image.height(),
          "kernel " + std::to_string(kernel.size_x()) + "x" +
              std::to_string(kernel.size_y()) + " larger than image " +
              std::to_string(image.width()) + "x" +
              std::to_string(image.height()));
  const int w = image.width();
  const int h = image.height();
  const int rx = kernel.radius_x();
  const int ry = kernel.radius_y();

  // Source column for output column x and kernel column i is x + rx - i.
  std::vector<int> col_map(static_cast<std::size_t>(w) * kernel.size_x());
  for (int i = 0; i < kernel.size_x(); ++i) {
    for (int x = 0; x < w; ++x) {
      col_map[i * w + x] = BoundaryIndex(x + rx - i, w, boundary);
    }
  }

  GrayImage out(w, h, 0.0);
  for (int y = 0; y < h; ++y) {
    double* dst = &out.at(0, y);
    for (int j = 0; j < kernel.size_y(); ++j) {
      const double* src =
          image.pixels().data() +
          static_cast<std::size_t>(BoundaryIndex(y + ry - j, h, boundary)) * w;
      for (int i = 0; i < kernel.size_x(); ++i) {
        const double k = kernel.at(i, j);
        if (k == 0.0) continue;
        const int* cols = &col_map[i * w];
        for (int x = 0; x < w; ++x) dst[x] += k * src[cols[x]];
      }
    }
  }
  return out;
}

GrayImage ConvolveFft(const GrayImage& image, const Kernel& kernel) {
  Require(kernel.size_x() <= image.width() && kernel.size_y() <= image.height(),
          "kernel larger than image");
  fft::Spectrum s = fft::Forward(image);
  const fft::Spectrum k =
      fft::TransferFunction(kernel, image.width(), image.height());
  for (std::size_t i = 0; i < s.bins.size(); ++i) s.bins[i] *= k.bins[i];
  return fft::Inverse(s);
}

GrayImage PadSymmetric(const GrayImage& image, int left, int top, int out_w,
                       int out_h) {
  Require(left >= 0 && top >= 0 && out_w >= left + image.width() &&
              out_h >= top + image.height(),
          "padding target smaller than image");
  GrayImage out(out_w, out_h);
  for (int y = 0; y < out_h; ++y) {
    const int sy = BoundaryIndex(y - top, image.height(), Boundary::kSymmetric);
    for (int x = 0; x < out_w; ++x) {
      out.at(x, y) =
          image.at(BoundaryIndex(x - left, image.width(), Boundary::kSymmetric), sy);
    }
  }
  return out;
}

GrayImage CircularShift(const GrayImage& image, int dx, int dy) {
  const int w = image.width();
  const int h = image.height();
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      out.at(BoundaryIndex(x + dx, w, Boundary::kPeriodic),
             BoundaryIndex(y + dy, h, Boundary::kPeriodic)) = image.at(x, y);
    }
  }
  return out;
}

}  // namespace yawdeblur
