#include <cmath>

#include "working_grid.h"
#include "yawdeblur/core/error.h"

namespace yawdeblur {

namespace {
constexpr double kDenominatorFloor = 1e-12;
}

WienerParams WienerParams::FromSnrDb(double snr_db) {
  WienerParams params;
  params.nsr = std::pow(10.0, -snr_db / 10.0);
  return params;
}

GrayImage WienerDeblur(const GrayImage& blurred, const Kernel& kernel,
                       const WienerParams& params, DeconvDiagnostics* diagnostics) {
  Require(std::isfinite(params.nsr) && params.nsr >= 0.0, "nsr must be >= 0");
  const internal::WorkingGrid grid =
      internal::MakeWorkingGrid(blurred, kernel, params.boundary);
  fft::Spectrum spec = fft::Forward(grid.image);
  const fft::Spectrum otf =
      fft::TransferFunction(kernel, grid.image.width(), grid.image.height());
  bool floored = false;
  for (std::size_t i = 0; i < spec.bins.size(); ++i) {
    const std::complex<double> h = otf.bins[i];
    double denom = std::norm(h) + params.nsr;
    if (denom < kDenominatorFloor) {
      denom = kDenominatorFloor;
      floored = true;
    }
    spec.bins[i] = std::conj(h) * spec.bins[i] / denom;
  }
  if (diagnostics) diagnostics->unstable = floored && params.nsr == 0.0;
  return grid.Restore(fft::Inverse(spec));
}

}  // namespace yawdeblur
