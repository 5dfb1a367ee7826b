#include <cmath>
#include <limits>

#include "doctest.h"
#include "test_support.h"
#include "yawdeblur/core/error.h"
#include "yawdeblur/metrics.h"

using namespace yawdeblur;

namespace {

double MseOracle(const GrayImage& a, const GrayImage& b) {
  double acc = 0.0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) {
      const double d = a.at(x, y) - b.at(x, y);
      acc += d * d;
    }
  return acc / (a.width() * a.height());
}

// Full 2-D window evaluated at every valid position.
double SsimOracle(const GrayImage& a, const GrayImage& b) {
  const int n = 11;
  const double sigma = 1.5;
  double win[11][11];
  double total = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      win[j][i] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / (2 * sigma * sigma));
      total += win[j][i];
    }
  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  double sum = 0.0;
  int count = 0;
  for (int y = 0; y + n <= a.height(); ++y)
    for (int x = 0; x + n <= a.width(); ++x) {
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const double w = win[j][i] / total;
          const double va = a.at(x + i, y + j), vb = b.at(x + i, y + j);
          ma += w * va;
          mb += w * vb;
          saa += w * va * va;
          sbb += w * vb * vb;
          sab += w * va * vb;
        }
      saa -= ma * ma;
      sbb -= mb * mb;
      sab -= ma * mb;
      sum += ((2 * ma * mb + c1) * (2 * sab + c2)) /
             ((ma * ma + mb * mb + c1) * (saa + sbb + c2));
      ++count;
    }
  return sum / count;
}

}  // namespace

TEST_CASE("psnr basics") {
  auto x = testing::RandomImage(20, 10, 1);
  CHECK(Psnr(x, x) == std::numeric_limits<double>::infinity());
  CHECK(Psnr(GrayImage(8, 8, 0.6), GrayImage(8, 8, 0.5)) == doctest::Approx(20.0));
  CHECK_THROWS_AS(Psnr(x, GrayImage(10, 20)), Error);
}

TEST_CASE("psnr matches a direct MSE") {
  auto x = testing::RandomImage(33, 21, 2);
  auto y = testing::RandomImage(33, 21, 3);
  CHECK(std::abs(Psnr(x, y) - 10.0 * std::log10(1.0 / MseOracle(x, y))) <= 1e-9);
  CHECK(Psnr(x, y) == Psnr(y, x));
  GrayImage xs = x, ys = y;
  for (auto* img : {&xs, &ys})
    for (double& v : img->pixels()) v += 0.3;
  CHECK(Psnr(xs, ys) == doctest::Approx(Psnr(x, y)).epsilon(1e-12));
}

TEST_CASE("ssim identity, symmetry and inversion") {
  auto x = testing::RandomImage(40, 30, 4);
  CHECK(Ssim(x, x) == 1.0);
  auto y = testing::RandomImage(40, 30, 5);
  CHECK(Ssim(x, y) == Ssim(y, x));
  GrayImage inv = x;
  for (double& v : inv.pixels()) v = 1.0 - v;
  CHECK(Ssim(inv, x) < 0.0);
  CHECK(Ssim(x, y) >= -1.0);
  CHECK(Ssim(x, y) <= 1.0);
}

TEST_CASE("ssim matches a sliding-window oracle") {
  auto x = testing::RandomImage(32, 32, 6);
  auto y = testing::RandomImage(32, 32, 7);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = 0.6 * x[i] + 0.4 * y[i];
  CHECK(std::abs(Ssim(x, y) - SsimOracle(x, y)) <= 1e-6);
}

TEST_CASE("ssim rejects bad input") {
  CHECK_THROWS_AS(Ssim(GrayImage(10, 12), GrayImage(10, 12)), Error);
  CHECK_THROWS_AS(Ssim(GrayImage(12, 12), GrayImage(13, 12)), Error);
}
