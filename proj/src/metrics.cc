#include "yawdeblur/metrics.h"

#include <cmath>
#include <string>
#include <vector>

#include "yawdeblur/core/error.h"

namespace yawdeblur {

namespace {

std::vector<double> GaussianTaps(int size, double sigma) {
  std::vector<double> taps(size);
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - size / 2;
    taps[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// Separable weighted mean over every fully contained window ("valid").
std::vector<double> FilterValid(std::span<const double> src, int w, int h,
                                const std::vector<double>& taps) {
  const int n = static_cast<int>(taps.size());
  const int ow = w - n + 1;
  const int oh = h - n + 1;
  std::vector<double> rows(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += taps[i] * src[y * w + x + i];
      rows[y * ow + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += taps[j] * rows[(y + j) * ow + x];
      out[y * ow + x] = acc;
    }
  }
  return out;
}

}  // namespace

double Psnr(const GrayImage& x, const GrayImage& ref) {
  Require(x.SameShape(ref) && !x.empty(), "psnr needs two images of the same size");
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - ref[i];
    sse += d * d;
  }
  if (sse == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = sse / static_cast<double>(x.size());
  return 10.0 * std::log10(1.0 / mse);
}

double Ssim(const GrayImage& x, const GrayImage& ref, const SsimConfig& config) {
  Require(x.SameShape(ref), "ssim needs two images of the same size");
  Require(config.window % 2 == 1 && config.window > 0 && config.sigma > 0.0,
          "ssim window must be odd with positive sigma");
  Require(config.k1 > 0.0 && config.k2 > 0.0, "ssim constants must be positive");
  Require(x.width() >= config.window && x.height() >= config.window,
          "images must be at least " + std::to_string(config.window) + " pixels on a side");
  const int w = x.width();
  const int h = x.height();
  const auto taps = GaussianTaps(config.window, config.sigma);

  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = ref[i] * ref[i];
    xy[i] = x[i] * ref[i];
  }
  const auto mu_x = FilterValid(x.pixels(), w, h, taps);
  const auto mu_y = FilterValid(ref.pixels(), w, h, taps);
  const auto e_xx = FilterValid(xx, w, h, taps);
  const auto e_yy = FilterValid(yy, w, h, taps);
  const auto e_xy = FilterValid(xy, w, h, taps);

  const double c1 = std::pow(config.k1 * config.dynamic_range, 2);
  const double c2 = std::pow(config.k2 * config.dynamic_range, 2);
  double total = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double mxy = mu_x[i] * mu_y[i];
    const double mxx = mu_x[i] * mu_x[i];
    const double myy = mu_y[i] * mu_y[i];
    const double sxy = e_xy[i] - mxy;
    const double sxx = e_xx[i] - mxx;
    const double syy = e_yy[i] - myy;
    total += ((2.0 * mxy + c1) * (2.0 * sxy + c2)) /
             ((mxx + myy + c1) * (sxx + syy + c2));
  }
  return total / static_cast<double>(mu_x.size());
}

}  // namespace yawdeblur
