#pragma once

#include <limits>

#include "yawdeblur/core/image.h"

namespace yawdeblur {

struct SsimConfig {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

// 10 log10(1 / MSE) for unit dynamic range; +inf when the images match.
double Psnr(const GrayImage& x, const GrayImage& ref);

// Mean of the Gaussian-weighted local SSIM map over all positions where the
// window fits inside the image.
double Ssim(const GrayImage& x, const GrayImage& ref, const SsimConfig& config = {});

}  // namespace yawdeblur
