#include "yawdeblur/core/noise.h"

#include <cmath>
#include <random>

#include "yawdeblur/core/error.h"

namespace yawdeblur {

double SignalPower(const GrayImage& image) {
  double acc = 0.0;
  for (double v : image.pixels()) acc += v * v;
  return image.empty() ? 0.0 : acc / static_cast<double>(image.size());
}

GrayImage AddAwgn(const GrayImage& image, const NoiseSpec& spec) {
  Require(!image.empty(), "cannot add noise to an empty image");
  Require(!std::isnan(spec.snr_db) &&
              spec.snr_db != -std::numeric_limits<double>::infinity(),
          "snr_db must be finite or +inf");
  if (spec.noise_free()) return image;
  const double power = SignalPower(image);
  Require(power > 0.0, "signal power is zero; SNR is undefined");
  const double sigma = std::sqrt(power / std::pow(10.0, spec.snr_db / 10.0));
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  GrayImage out = image;
  for (double& v : out.pixels()) v += gauss(rng);
  return out;
}

}  // namespace yawdeblur
