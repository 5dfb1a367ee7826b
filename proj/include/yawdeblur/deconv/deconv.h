#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "yawdeblur/core/image.h"
#include "yawdeblur/core/kernel.h"

namespace yawdeblur {

// Boundary model for the frequency-domain solves.
enum class SolveBoundary {
  // Pad with a smooth wrap-around fill so the frame tiles without a seam,
  // solve periodically, crop back.
  kSymmetricPad,
  // Treat the image as one period. Exact for periodically blurred input.
  kPeriodic,
};

struct WienerParams {
  // Noise-to-signal power ratio; 0 is plain inverse filtering.
  double nsr = 1e-3;
  SolveBoundary boundary = SolveBoundary::kSymmetricPad;

  static WienerParams FromSnrDb(double snr_db);
};

struct RlParams {
  int iterations = 20;
  SolveBoundary boundary = SolveBoundary::kSymmetricPad;
};

struct HyperLapParams {
  double lambda = 3000.0;
  double p = 2.0 / 3.0;
  double beta_init = 1.0;
  double beta_rate = 2.8284271247461903;  // 2 * sqrt(2)
  double beta_max = 256.0;
  SolveBoundary boundary = SolveBoundary::kSymmetricPad;

  void Validate() const;
};

struct EdgeTaperSpec {
  Kernel taper_kernel = Kernel::Gaussian(31, 31, 10.0);
};

// One half-quadratic stage of the hyper-Laplacian solver. Energies are
// lambda/2 |k*x - y|^2 + beta/2 |w - grad x|^2 + sum |w|^p on the working
// grid, before and after the stage's (w, x) updates.
struct HqsStage {
  double beta = 0.0;
  double energy_before = 0.0;
  double energy_after = 0.0;
};

struct DeconvDiagnostics {
  // Wiener with nsr = 0 hit a spectral zero and used the epsilon floor.
  bool unstable = false;
  // Richardson-Lucy input pixels below zero that were clipped.
  std::size_t clipped_negatives = 0;
  std::vector<HqsStage> stages;
};

// Per-axis window weights: 1 on the central plateau, falling to 0 at the
// border, derived from the autocorrelation of the taper kernel's
// projection onto that axis.
std::vector<double> EdgeTaperProfile(const Kernel& taper, int length, bool horizontal);

// J = W .* I + (1 - W) .* (I (*) k_et), with a mirror boundary for the blur.
// Rejects images not strictly larger than the taper kernel.
GrayImage EdgeTaper(const GrayImage& image, const EdgeTaperSpec& spec = {});

// Per frequency: conj(K) B / (|K|^2 + nsr).
GrayImage WienerDeblur(const GrayImage& blurred, const Kernel& kernel,
                       const WienerParams& params = {},
                       DeconvDiagnostics* diagnostics = nullptr);

// Multiplicative update x <- x .* (k' (*) (B ./ (x (*) k))), started from B.
GrayImage RlDeblur(const GrayImage& blurred, const Kernel& kernel,
                   const RlParams& params = {},
                   DeconvDiagnostics* diagnostics = nullptr);

// argmin_w |w|^p + beta/2 (w - v)^2. Closed forms for p in {1/2, 2/3, 1};
// other exponents use a bracketed root search.
double ShrinkHyperLaplacian(double v, double beta, double p);

GrayImage HyperLaplacianDeblur(const GrayImage& blurred, const Kernel& kernel,
                               const HyperLapParams& params = {},
                               DeconvDiagnostics* diagnostics = nullptr);

enum class Method { kWiener, kRl, kHyperLaplacian };

std::string_view MethodName(Method method);
// Accepts "wiener", "rl", "hyperlap". Rejects anything else.
Method ParseMethod(std::string_view name);

struct DeblurSettings {
  Method method = Method::kWiener;
  WienerParams wiener;
  RlParams rl;
  HyperLapParams hyperlap;
  bool edge_taper = true;
  EdgeTaperSpec taper;
};

struct DeblurResult {
  GrayImage image;
  Method method = Method::kWiener;
  double ms = 0.0;
  DeconvDiagnostics diagnostics;
};

// Edge-taper (unless disabled), then the selected engine; timed.
DeblurResult Deblur(const GrayImage& blurred, const Kernel& kernel,
                    const DeblurSettings& settings);

}  // namespace yawdeblur
