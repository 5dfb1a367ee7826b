#pragma once

#include <cstdint>
#include <limits>

#include "yawdeblur/core/image.h"

namespace yawdeblur {

// SNR is 10*log10(mean(x^2) / noise variance). +inf means "no noise".
struct NoiseSpec {
  double snr_db = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;

  static NoiseSpec None() { return {}; }
  bool noise_free() const {
    return snr_db == std::numeric_limits<double>::infinity();
  }
};

double SignalPower(const GrayImage& image);

// Additive white Gaussian noise calibrated to spec.snr_db. Deterministic in
// (image, spec). Rejects empty and all-zero images and NaN / -inf SNR.
GrayImage AddAwgn(const GrayImage& image, const NoiseSpec& spec);

}  // namespace yawdeblur
