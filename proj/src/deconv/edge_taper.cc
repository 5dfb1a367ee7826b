#include <string>

#include "yawdeblur/core/convolve.h"
#include "yawdeblur/core/error.h"
#include "yawdeblur/deconv/deconv.h"

namespace yawdeblur {

std::vector<double> EdgeTaperProfile(const Kernel& taper, int length, bool horizontal) {
  const int taps = horizontal ? taper.size_x() : taper.size_y();
  Require(length > taps, "image must be larger than the taper kernel");
  std::vector<double> proj(taps, 0.0);
  for (int y = 0; y < taper.size_y(); ++y) {
    for (int x = 0; x < taper.size_x(); ++x) proj[horizontal ? x : y] += taper.at(x, y);
  }
  // Linear autocorrelation, lags -(taps-1)..(taps-1), folded onto a circle
  // of length-1 samples; the last sample repeats the first.
  const int period = length - 1;
  std::vector<double> folded(period, 0.0);
  double peak = 0.0;
  for (int lag = -(taps - 1); lag <= taps - 1; ++lag) {
    double acc = 0.0;
    for (int i = 0; i < taps; ++i) {
      const int j = i + lag;
      if (j >= 0 && j < taps) acc += proj[i] * proj[j];
    }
    folded[((lag % period) + period) % period] += acc;
    if (lag == 0) peak = acc;
  }
  std::vector<double> profile(length);
  for (int i = 0; i < period; ++i) profile[i] = 1.0 - folded[i] / peak;
  profile[length - 1] = profile[0];
  return profile;
}

GrayImage EdgeTaper(const GrayImage& image, const EdgeTaperSpec& spec) {
  const Kernel& k = spec.taper_kernel;
  Require(image.width() > k.size_x() && image.height() > k.size_y(),
          "image " + std::to_string(image.width()) + "x" +
              std::to_string(image.height()) +
              " too small for edge taper kernel " + std::to_string(k.size_x()) +
              "x" + std::to_string(k.size_y()));
  const std::vector<double> wx = EdgeTaperProfile(k, image.width(), true);
  const std::vector<double> wy = EdgeTaperProfile(k, image.height(), false);
  // The taper blur uses the same mirror boundary as the deconvolution
  // solves, so border pixels blend with nearby content rather than with
  // the opposite edge.
  const int rx = k.radius_x();
  const int ry = k.radius_y();
  const GrayImage blurred =
      ConvolveFft(PadSymmetric(image, rx, ry, image.width() + 2 * rx,
                               image.height() + 2 * ry),
                  k)
          .Crop(rx, ry, image.width(), image.height());
  GrayImage out(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const double w = wx[x] * wy[y];
      out.at(x, y) = w * image.at(x, y) + (1.0 - w) * blurred.at(x, y);
    }
  }
  return out;
}

}  // namespace yawdeblur
