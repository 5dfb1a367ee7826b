#include <cmath>
#include <numeric>

#include "doctest.h"
#include "test_support.h"
#include "yawdeblur/core/convolve.h"
#include "yawdeblur/core/error.h"
#include "yawdeblur/core/fft.h"
#include "yawdeblur/core/noise.h"
#include "yawdeblur/core/synthetic.h"
#include "yawdeblur/deconv/deconv.h"
#include "yawdeblur/metrics.h"
#include "yawdeblur/psf_analytic.h"

using namespace yawdeblur;

namespace {

Kernel Kernel60() {
  return SynthesizePsf(testing::GimbalCamera(), testing::Motion(60.0));
}

GrayImage Textured(int w, int h, std::uint64_t seed) {
  GrayImage scene = SyntheticScene(w, h, seed);
  GrayImage noise = testing::RandomImage(w, h, seed + 77, -0.05, 0.05);
  for (std::size_t i = 0; i < scene.size(); ++i) scene[i] += noise[i];
  return scene;
}

double Total(const GrayImage& img) {
  return std::accumulate(img.pixels().begin(), img.pixels().end(), 0.0);
}

}  // namespace

TEST_CASE("edge taper leaves constants and the center untouched") {
  GrayImage flat(80, 70, 0.42);
  auto j = EdgeTaper(flat);
  for (double v : j.pixels()) CHECK(v == doctest::Approx(0.42).epsilon(1e-12));

  auto img = testing::RandomImage(128, 128, 3);
  auto out = EdgeTaper(img);
  const int m = EdgeTaperSpec{}.taper_kernel.size_x();
  for (int y = m; y < 128 - m; ++y)
    for (int x = m; x < 128 - m; ++x) REQUIRE(out.at(x, y) == img.at(x, y));
}

TEST_CASE("edge taper matches the blend oracle") {
  auto img = testing::RandomImage(128, 128, 4);
  const Kernel& k = EdgeTaperSpec{}.taper_kernel;
  auto wx = testing::TaperWeightsOracle(k, 128, true);
  auto wy = testing::TaperWeightsOracle(k, 128, false);
  auto blurred = testing::ConvolveOracle(img, k, Boundary::kSymmetric);
  auto out = EdgeTaper(img);
  double err = 0.0;
  for (int y = 0; y < 128; ++y)
    for (int x = 0; x < 128; ++x) {
      const double w = wx[x] * wy[y];
      err = std::max(err, std::abs(out.at(x, y) - (w * img.at(x, y) + (1 - w) * blurred.at(x, y))));
    }
  CHECK(err <= 1e-9);
  // Weight is zero on the outer ring, so the border is the blurred image.
  CHECK(wx[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(out.at(0, 50) - blurred.at(0, 50)) <= 1e-9);
  auto profile = EdgeTaperProfile(k, 128, true);
  for (int i = 0; i < 128; ++i) CHECK(profile[i] == doctest::Approx(wx[i]).epsilon(1e-12));
}

TEST_CASE("edge taper rejects small images") {
  CHECK_THROWS_AS(EdgeTaper(GrayImage(31, 100)), Error);
  CHECK_THROWS_AS(EdgeTaper(GrayImage(100, 20)), Error);
  CHECK_NOTHROW(EdgeTaper(GrayImage(32, 32, 0.5)));
}

TEST_CASE("wiener with a delta kernel is the identity") {
  auto img = testing::RandomImage(40, 33, 5);
  WienerParams p;
  p.nsr = 0.0;
  DeconvDiagnostics diag;
  CHECK(testing::MaxAbsDiff(WienerDeblur(img, Kernel::Delta(), p, &diag), img) <= 1e-9);
  CHECK_FALSE(diag.unstable);
}

TEST_CASE("wiener per-frequency formula on a 16x16 grid") {
  auto b = testing::RandomImage(16, 16, 6);
  auto k = Kernel::MotionLine(5.0, 30.0);
  WienerParams p;
  p.nsr = 0.01;
  p.boundary = SolveBoundary::kPeriodic;
  auto out = WienerDeblur(b, k, p);
  std::vector<double> bd(b.pixels().begin(), b.pixels().end());
  std::vector<double> od(out.pixels().begin(), out.pixels().end());
  auto bs = testing::NaiveDft(bd, 16, 16);
  auto ks = testing::NaiveDft(testing::KernelOnGrid(k, 16, 16), 16, 16);
  auto os = testing::NaiveDft(od, 16, 16);
  double err = 0.0;
  for (std::size_t i = 0; i < bs.size(); ++i) {
    const auto want = std::conj(ks[i]) * bs[i] / (std::norm(ks[i]) + p.nsr);
    err = std::max(err, std::abs(os[i] - want));
  }
  CHECK(err <= 1e-9);
}

TEST_CASE("wiener exactly inverts a spectrally non-vanishing blur") {
  auto l = testing::RandomImage(64, 48, 7);
  auto k = Kernel::Gaussian(5, 5, 0.7);
  WienerParams p;
  p.nsr = 0.0;
  p.boundary = SolveBoundary::kPeriodic;
  CHECK(testing::Rms(WienerDeblur(ConvolveFft(l, k), k, p), l) <= 1e-6);
}

TEST_CASE("wiener flags spectral zeros at zero nsr") {
  auto b = testing::RandomImage(32, 32, 8);
  WienerParams p;
  p.nsr = 0.0;
  p.boundary = SolveBoundary::kPeriodic;
  DeconvDiagnostics diag;
  // A 2-tap box has an exact zero at the Nyquist column.
  auto out = WienerDeblur(b, Kernel::FromWeights(3, 1, {0, 1, 1}), p, &diag);
  CHECK(diag.unstable);
  CHECK(out.AllFinite());
  p.nsr = -1.0;
  CHECK_THROWS_AS(WienerDeblur(b, Kernel::Delta(), p), Error);
}

TEST_CASE("wiener is linear in the observation") {
  auto x = testing::RandomImage(50, 40, 9);
  auto y = testing::RandomImage(50, 40, 10);
  auto k = Kernel60();
  GrayImage mix(50, 40);
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = 2.0 * x[i] - 0.5 * y[i];
  auto wx = WienerDeblur(x, k), wy = WienerDeblur(y, k), wm = WienerDeblur(mix, k);
  double err = 0.0;
  for (std::size_t i = 0; i < mix.size(); ++i)
    err = std::max(err, std::abs(wm[i] - (2.0 * wx[i] - 0.5 * wy[i])));
  CHECK(err <= 1e-9);
}

TEST_CASE("wiener roundtrip with the 60 deg/s kernel") {
  auto l = Textured(256, 256, 11);
  auto k = Kernel60();
  auto b = ConvolveFft(l, k);
  WienerParams p;
  p.nsr = 1e-6;
  p.boundary = SolveBoundary::kPeriodic;
  CHECK(Psnr(WienerDeblur(b, k, p), l) >= Psnr(b, l) + 5.0);
}

TEST_CASE("wiener nsr from SNR") {
  CHECK(WienerParams::FromSnrDb(30.0).nsr == doctest::Approx(1e-3));
  CHECK(WienerParams{}.nsr == 1e-3);
}

TEST_CASE("richardson-lucy delta kernel is a fixed point") {
  auto b = testing::RandomImage(30, 20, 12, 0.1, 1.0);
  RlParams p;
  p.iterations = 1;
  CHECK(testing::MaxAbsDiff(RlDeblur(b, Kernel::Delta(), p), b) <= 1e-12);
  p.iterations = 25;
  CHECK(testing::MaxAbsDiff(RlDeblur(b, Kernel::Delta(), p), b) <= 1e-12);
}

TEST_CASE("richardson-lucy stays non-negative and conserves flux") {
  auto b = testing::RandomImage(64, 64, 13, 0.0, 1.0);
  auto k = Kernel::MotionLine(9.0, 60.0);
  RlParams p;
  p.iterations = 50;
  auto out = RlDeblur(b, k, p);
  CHECK(*std::min_element(out.pixels().begin(), out.pixels().end()) >= 0.0);

  p.boundary = SolveBoundary::kPeriodic;
  const double flux = Total(b);
  for (int it = 1; it <= 10; ++it) {
    p.iterations = it;
    CHECK(std::abs(Total(RlDeblur(b, k, p)) - flux) <= 1e-6);
  }
}

TEST_CASE("richardson-lucy clips negative input") {
  auto b = testing::RandomImage(32, 32, 14, -0.2, 1.0);
  DeconvDiagnostics diag;
  auto out = RlDeblur(b, Kernel::Gaussian(3, 3, 0.8), {}, &diag);
  CHECK(diag.clipped_negatives > 0);
  CHECK(*std::min_element(out.pixels().begin(), out.pixels().end()) >= 0.0);
  RlParams bad;
  bad.iterations = 0;
  CHECK_THROWS_AS(RlDeblur(b, Kernel::Delta(), bad), Error);
}

TEST_CASE("richardson-lucy roundtrip with the 60 deg/s kernel") {
  auto k = Kernel60();
  RlParams p;
  p.iterations = 30;
  p.boundary = SolveBoundary::kPeriodic;
  // High-contrast structure: the full 3 dB.
  GrayImage checker(256, 256);
  for (int y = 0; y < 256; ++y)
    for (int x = 0; x < 256; ++x) checker.at(x, y) = ((x / 16 + y / 16) % 2) ? 0.8 : 0.2;
  auto b = ConvolveFft(checker, k);
  CHECK(Psnr(RlDeblur(b, k, p), checker) >= Psnr(b, checker) + 3.0);
  // Smooth shading converges more slowly (about +2 dB at 30 iterations).
  auto scene = SyntheticScene(256, 256, 15);
  auto bs = ConvolveFft(scene, k);
  CHECK(Psnr(RlDeblur(bs, k, p), scene) >= Psnr(bs, scene) + 1.5);
}

TEST_CASE("hyper-laplacian shrinkage") {
  for (double p : {0.5, 2.0 / 3.0, 1.0, 0.8}) {
    CAPTURE(p);
    CHECK(ShrinkHyperLaplacian(0.0, 7.0, p) == 0.0);
    for (double beta : {1.0, 8.0, 64.0, 256.0}) {
      for (double v : {-0.9, -0.3, -0.05, 0.02, 0.11, 0.5, 0.97}) {
        CAPTURE(beta);
        CAPTURE(v);
        CHECK(std::abs(ShrinkHyperLaplacian(v, beta, p) - testing::GridSearchShrink(v, beta, p)) <=
              1e-4);
      }
    }
  }
  CHECK(std::abs(ShrinkHyperLaplacian(0.5, 256.0, 2.0 / 3.0) -
                 testing::GridSearchShrink(0.5, 256.0, 2.0 / 3.0)) <= 1e-4);
  CHECK_THROWS_AS(ShrinkHyperLaplacian(0.1, 1.0, 1.5), Error);
  CHECK_THROWS_AS(ShrinkHyperLaplacian(0.1, 1.0, 0.0), Error);
}

TEST_CASE("hyper-laplacian with a delta kernel") {
  auto b = SyntheticScene(96, 80, 16);
  HyperLapParams p;
  CHECK(testing::Rms(HyperLaplacianDeblur(b, Kernel::Delta(), p), b) <= 0.01);
  p.lambda = 1e6;
  CHECK(testing::Rms(HyperLaplacianDeblur(b, Kernel::Delta(), p), b) <= 1e-3);
}

TEST_CASE("hyper-laplacian energy never rises within a stage") {
  auto l = Textured(96, 96, 17);
  auto k = Kernel::MotionLine(11.0, 10.0);
  auto b = AddAwgn(Convolve(l, k), {35.0, 2});
  DeconvDiagnostics diag;
  HyperLaplacianDeblur(b, k, {}, &diag);
  REQUIRE(diag.stages.size() == 6);  // 1, 2.8, 8, 22.6, 64, 181
  CHECK(diag.stages.front().beta == 1.0);
  CHECK(diag.stages.back().beta == doctest::Approx(64.0 * 2.0 * std::sqrt(2.0)));
  for (const auto& s : diag.stages)
    CHECK(s.energy_after <= s.energy_before * (1 + 1e-12));
}

TEST_CASE("hyper-laplacian parameter validation") {
  auto b = testing::RandomImage(32, 32, 18);
  HyperLapParams p;
  p.p = 1.2;
  CHECK_THROWS_AS(HyperLaplacianDeblur(b, Kernel::Delta(), p), Error);
  p = {};
  p.lambda = 0.0;
  CHECK_THROWS_AS(HyperLaplacianDeblur(b, Kernel::Delta(), p), Error);
  p = {};
  p.beta_rate = 1.0;
  CHECK_THROWS_AS(HyperLaplacianDeblur(b, Kernel::Delta(), p), Error);
  p = {};
  p.beta_max = 0.5;
  CHECK_THROWS_AS(HyperLaplacianDeblur(b, Kernel::Delta(), p), Error);
}

TEST_CASE("all engines are deterministic") {
  auto b = Textured(90, 70, 19);
  auto k = Kernel::MotionLine(9.0, 0.0);
  CHECK(WienerDeblur(b, k) == WienerDeblur(b, k));
  CHECK(RlDeblur(b, k) == RlDeblur(b, k));
  CHECK(HyperLaplacianDeblur(b, k) == HyperLaplacianDeblur(b, k));
}

TEST_CASE("deblur dispatch") {
  auto b = Textured(100, 90, 20);
  auto k = Kernel::MotionLine(9.0, 0.0);
  DeblurSettings s;
  auto r = Deblur(b, k, s);
  CHECK(r.image == WienerDeblur(EdgeTaper(b), k));
  CHECK(r.method == Method::kWiener);
  CHECK(r.ms > 0.0);
  s.edge_taper = false;
  CHECK(Deblur(b, k, s).image == WienerDeblur(b, k));
  s.method = Method::kRl;
  CHECK(Deblur(b, k, s).image == RlDeblur(b, k));
  s.method = Method::kHyperLaplacian;
  CHECK(Deblur(b, k, s).image == HyperLaplacianDeblur(b, k));

  CHECK(ParseMethod("wiener") == Method::kWiener);
  CHECK(ParseMethod("rl") == Method::kRl);
  CHECK(ParseMethod("hyperlap") == Method::kHyperLaplacian);
  CHECK(MethodName(Method::kHyperLaplacian) == "hyperlap");
  CHECK_THROWS_AS(ParseMethod("lucy"), Error);
}

TEST_CASE("every method improves on the blurred input") {
  auto k = Kernel60();
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    auto l = SyntheticScene(200, 160, seed);
    auto b = AddAwgn(Convolve(l, k), {38.0, seed});
    const double base = Psnr(b, l);
    for (Method m : {Method::kWiener, Method::kRl, Method::kHyperLaplacian}) {
      CAPTURE(MethodName(m));
      DeblurSettings s;
      s.method = m;
      s.wiener.nsr = 0.01;
      CHECK(Psnr(Deblur(b, k, s).image, l) > base);
    }
  }
}
