#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "working_grid.h"
#include "yawdeblur/core/error.h"

namespace yawdeblur {

void HyperLapParams::Validate() const {
  Require(std::isfinite(lambda) && lambda > 0.0, "lambda must be positive");
  Require(p > 0.0 && p <= 1.0, "prior exponent p must lie in (0, 1]");
  Require(beta_init > 0.0, "beta_init must be positive");
  Require(beta_rate > 1.0, "beta_rate must exceed 1");
  Require(beta_max >= beta_init, "beta_max must be >= beta_init");
}

namespace {

double ShrinkObjective(double w, double v, double beta, double p) {
  return std::pow(std::abs(w), p) + 0.5 * beta * (w - v) * (w - v);
}

// Largest real root of m^3 + a m + b = 0 (a < 0 or single real root).
double LargestCubicRoot(double a, double b) {
  const double disc = b * b / 4.0 + a * a * a / 27.0;
  if (disc >= 0.0) {
    const double sq = std::sqrt(disc);
    return std::cbrt(-b / 2.0 + sq) + std::cbrt(-b / 2.0 - sq);
  }
  const double r = 2.0 * std::sqrt(-a / 3.0);
  const double arg = std::clamp((3.0 * b / (2.0 * a)) * std::sqrt(-3.0 / a), -1.0, 1.0);
  return r * std::cos(std::acos(arg) / 3.0);
}

// |w|^(2/3): with w = t^3 the stationarity condition becomes the quartic
// t^4 - a t + 2/(3 beta) = 0, solved by Ferrari's method.
double ShrinkTwoThirds(double a, double beta) {
  const double c = 2.0 / (3.0 * beta);
  // Resolvent cubic m^3 - c m - a^2/8 = 0 has exactly one positive root.
  const double m = LargestCubicRoot(-c, -a * a / 8.0);
  if (!(m > 0.0)) return 0.0;
  const double s = std::sqrt(2.0 * m);
  const double disc = 2.0 * a / s - 2.0 * m;
  if (disc < 0.0) return 0.0;
  const double t = (s + std::sqrt(disc)) / 2.0;
  const double w = std::min(t * t * t, a);
  return ShrinkObjective(w, a, beta, 2.0 / 3.0) < ShrinkObjective(0.0, a, beta, 2.0 / 3.0)
             ? w
             : 0.0;
}

// |w|^(1/2): with w = t^2 the condition is t^3 - a t + 1/(2 beta) = 0.
double ShrinkHalf(double a, double beta) {
  const double q = 1.0 / (2.0 * beta);
  if (q * q / 4.0 - a * a * a / 27.0 > 0.0) return 0.0;  // no positive root
  const double t = LargestCubicRoot(-a, q);
  if (!(t > 0.0)) return 0.0;
  const double w = std::min(t * t, a);
  return ShrinkObjective(w, a, beta, 0.5) < ShrinkObjective(0.0, a, beta, 0.5) ? w : 0.0;
}

// General exponent: g(w) = beta (w - a) + p w^(p-1) is convex on (0, a];
// the local minimizer is its larger root, bracketed in [w*, a].
double ShrinkGeneral(double a, double beta, double p) {
  if (p == 1.0) return std::max(a - 1.0 / beta, 0.0);
  const double w_star = std::pow(p * (1.0 - p) / beta, 1.0 / (2.0 - p));
  auto g = [&](double w) { return beta * (w - a) + p * std::pow(w, p - 1.0); };
  if (w_star >= a || g(w_star) >= 0.0) return 0.0;
  double lo = w_star, hi = a;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, a); ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  const double w = 0.5 * (lo + hi);
  return ShrinkObjective(w, a, beta, p) < ShrinkObjective(0.0, a, beta, p) ? w : 0.0;
}

enum class GradAxis { kX, kY };

// Forward difference with wrap-around.
GrayImage Gradient(const GrayImage& x, GradAxis axis) {
  const int w = x.width();
  const int h = x.height();
  GrayImage g(w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      g.at(c, r) = axis == GradAxis::kX ? x.at((c + 1) % w, r) - x.at(c, r)
                                        : x.at(c, (r + 1) % h) - x.at(c, r);
    }
  }
  return g;
}

fft::Spectrum GradientTransfer(GradAxis axis, int width, int height) {
  // out(c) = in(c + 1) - in(c) as a convolution: taps {1, -1, 0}, anchor 1.
  const std::array<double, 3> taps = {1.0, -1.0, 0.0};
  return axis == GradAxis::kX
             ? fft::TransferFunction(taps, 3, 1, 1, 0, width, height)
             : fft::TransferFunction(taps, 1, 3, 0, 1, width, height);
}

struct Problem {
  const GrayImage& observed;
  const fft::Spectrum& otf;
  double lambda;
  double p;
};

double Energy(const Problem& prob, const GrayImage& x, const GrayImage& wx,
              const GrayImage& wy, double beta) {
  fft::Spectrum s = fft::Forward(x);
  for (std::size_t i = 0; i < s.bins.size(); ++i) s.bins[i] *= prob.otf.bins[i];
  const GrayImage reblurred = fft::Inverse(s);
  const GrayImage gx = Gradient(x, GradAxis::kX);
  const GrayImage gy = Gradient(x, GradAxis::kY);
  double data = 0.0, coupling = 0.0, prior = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = reblurred[i] - prob.observed[i];
    data += r * r;
    const double ex = wx[i] - gx[i];
    const double ey = wy[i] - gy[i];
    coupling += ex * ex + ey * ey;
    prior += std::pow(std::abs(wx[i]), prob.p) + std::pow(std::abs(wy[i]), prob.p);
  }
  return 0.5 * prob.lambda * data + 0.5 * beta * coupling + prior;
}

}  // namespace

double ShrinkHyperLaplacian(double v, double beta, double p) {
  Require(beta > 0.0, "beta must be positive");
  Require(p > 0.0 && p <= 1.0, "prior exponent p must lie in (0, 1]");
  if (v == 0.0) return 0.0;
  const double a = std::abs(v);
  double w;
  if (p == 1.0) {
    w = std::max(a - 1.0 / beta, 0.0);
  } else if (std::abs(p - 2.0 / 3.0) < 1e-12) {
    w = ShrinkTwoThirds(a, beta);
  } else if (std::abs(p - 0.5) < 1e-12) {
    w = ShrinkHalf(a, beta);
  } else {
    w = ShrinkGeneral(a, beta, p);
  }
  return std::copysign(w, v);
}

GrayImage HyperLaplacianDeblur(const GrayImage& blurred, const Kernel& kernel,
                               const HyperLapParams& params,
                               DeconvDiagnostics* diagnostics) {
  params.Validate();
  const internal::WorkingGrid grid =
      internal::MakeWorkingGrid(blurred, kernel, params.boundary);
  const GrayImage& y = grid.image;
  const int w = y.width();
  const int h = y.height();

  const fft::Spectrum otf = fft::TransferFunction(kernel, w, h);
  const fft::Spectrum fx = GradientTransfer(GradAxis::kX, w, h);
  const fft::Spectrum fy = GradientTransfer(GradAxis::kY, w, h);
  const fft::Spectrum fy_obs = fft::Forward(y);

  // lambda conj(K) Y and the beta-independent parts of the denominator.
  std::vector<std::complex<double>> data_num(otf.bins.size());
  std::vector<double> data_den(otf.bins.size());
  std::vector<double> grad_den(otf.bins.size());
  for (std::size_t i = 0; i < otf.bins.size(); ++i) {
    data_num[i] = params.lambda * std::conj(otf.bins[i]) * fy_obs.bins[i];
    data_den[i] = params.lambda * std::norm(otf.bins[i]);
    grad_den[i] = std::norm(fx.bins[i]) + std::norm(fy.bins[i]);
  }

  const Problem prob{y, otf, params.lambda, params.p};
  GrayImage x = y;
  GrayImage wx = Gradient(x, GradAxis::kX);
  GrayImage wy = Gradient(x, GradAxis::kY);
  std::vector<HqsStage> stages;

  for (double beta = params.beta_init; beta <= params.beta_max * (1.0 + 1e-12);
       beta *= params.beta_rate) {
    HqsStage stage;
    stage.beta = beta;
    if (diagnostics) stage.energy_before = Energy(prob, x, wx, wy, beta);

    // (a) per-pixel shrinkage of the current gradients.
    const GrayImage gx = Gradient(x, GradAxis::kX);
    const GrayImage gy = Gradient(x, GradAxis::kY);
    for (std::size_t i = 0; i < x.size(); ++i) {
      wx[i] = ShrinkHyperLaplacian(gx[i], beta, params.p);
      wy[i] = ShrinkHyperLaplacian(gy[i], beta, params.p);
    }

    // (b) quadratic image update, exact in the Fourier domain.
    const fft::Spectrum swx = fft::Forward(wx);
    const fft::Spectrum swy = fft::Forward(wy);
    fft::Spectrum sol = swx;
    for (std::size_t i = 0; i < sol.bins.size(); ++i) {
      const std::complex<double> num =
          data_num[i] + beta * (std::conj(fx.bins[i]) * swx.bins[i] +
                                std::conj(fy.bins[i]) * swy.bins[i]);
      sol.bins[i] = num / (data_den[i] + beta * grad_den[i]);
    }
    x = fft::Inverse(sol);

    if (diagnostics) {
      stage.energy_after = Energy(prob, x, wx, wy, beta);
      stages.push_back(stage);
    }
  }
  if (diagnostics) diagnostics->stages = std::move(stages);
  return grid.Restore(x);
}

}  // namespace yawdeblur
