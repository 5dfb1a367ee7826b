#include <algorithm>

#include "working_grid.h"
#include "yawdeblur/core/error.h"

namespace yawdeblur {

namespace {
constexpr double kRatioFloor = 1e-12;
}

GrayImage RlDeblur(const GrayImage& blurred, const Kernel& kernel,
                   const RlParams& params, DeconvDiagnostics* diagnostics) {
  Require(params.iterations >= 1, "RL needs at least one iteration");
  GrayImage observed = blurred;
  std::size_t clipped = 0;
  for (double& v : observed.pixels()) {
    if (v < 0.0) {
      v = 0.0;
      ++clipped;
    }
  }
  if (diagnostics) diagnostics->clipped_negatives = clipped;

  const internal::WorkingGrid grid =
      internal::MakeWorkingGrid(observed, kernel, params.boundary);
  const GrayImage& b = grid.image;
  const fft::Spectrum otf = fft::TransferFunction(kernel, b.width(), b.height());

  GrayImage estimate = b;
  GrayImage ratio(b.width(), b.height());
  for (int it = 0; it < params.iterations; ++it) {
    fft::Spectrum s = fft::Forward(estimate);
    for (std::size_t i = 0; i < s.bins.size(); ++i) s.bins[i] *= otf.bins[i];
    const GrayImage reblurred = fft::Inverse(s);
    for (std::size_t i = 0; i < ratio.size(); ++i) {
      ratio[i] = b[i] / std::max(reblurred[i], kRatioFloor);
    }
    fft::Spectrum r = fft::Forward(ratio);
    for (std::size_t i = 0; i < r.bins.size(); ++i) r.bins[i] *= std::conj(otf.bins[i]);
    const GrayImage correction = fft::Inverse(r);
    // Exact correction factors are non-negative; clamp FFT round-off.
    for (std::size_t i = 0; i < estimate.size(); ++i) {
      estimate[i] *= std::max(correction[i], 0.0);
    }
  }
  return grid.Restore(estimate);
}

}  // namespace yawdeblur
