#include "yawdeblur/core/kernel.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "yawdeblur/core/error.h"

namespace yawdeblur {

Kernel::Kernel() : size_x_(1), size_y_(1), weights_{1.0} {}

Kernel Kernel::FromWeights(int size_x, int size_y, std::vector<double> weights) {
  Require(size_x > 0 && size_y > 0 && size_x % 2 == 1 && size_y % 2 == 1,
          "kernel dimensions must be odd and positive, got " +
              std::to_string(size_x) + "x" + std::to_string(size_y));
  Require(weights.size() == static_cast<std::size_t>(size_x) * size_y,
          "kernel weight count does not match dimensions");
  double sum = 0.0;
  for (double& w : weights) {
    Require(std::isfinite(w), "kernel weight is not finite");
    Require(w >= kNegativeSlack,
            "kernel weight " + std::to_string(w) + " is negative");
    if (w < 0.0) w = 0.0;
    sum += w;
  }
  Require(sum > 0.0, "kernel weights sum to zero");
  for (double& w : weights) w /= sum;
  return Kernel(size_x, size_y, std::move(weights));
}

Kernel Kernel::Gaussian(int size_x, int size_y, double sigma) {
  Require(sigma > 0.0, "gaussian sigma must be positive");
  std::vector<double> w(static_cast<std::size_t>(size_x) * size_y);
  const double cx = size_x / 2;
  const double cy = size_y / 2;
  for (int y = 0; y < size_y; ++y) {
    for (int x = 0; x < size_x; ++x) {
      const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
      w[y * size_x + x] = std::exp(-r2 / (2.0 * sigma * sigma));
    }
  }
  return FromWeights(size_x, size_y, std::move(w));
}

Kernel Kernel::Uniform(int size_x, int size_y) {
  return FromWeights(size_x, size_y,
                     std::vector<double>(static_cast<std::size_t>(size_x) * size_y, 1.0));
}

Kernel Kernel::MotionLine(double length, double angle_deg) {
  Require(length >= 1.0, "motion line length must be >= 1");
  const double a = angle_deg * std::numbers::pi / 180.0;
  const double dx = std::cos(a);
  const double dy = -std::sin(a);
  const double half = (length - 1.0) / 2.0;
  const int rx = static_cast<int>(std::ceil(std::abs(half * dx))) + 1;
  const int ry = static_cast<int>(std::ceil(std::abs(half * dy))) + 1;
  const int sx = 2 * rx + 1;
  const int sy = 2 * ry + 1;
  std::vector<double> w(static_cast<std::size_t>(sx) * sy, 0.0);
  // Dense bilinear splat of points along the segment.
  const int samples = static_cast<int>(std::ceil(length)) * 64 + 1;
  for (int i = 0; i < samples; ++i) {
    const double t = samples == 1 ? 0.0 : -half + 2.0 * half * i / (samples - 1);
    const double px = rx + t * dx;
    const double py = ry + t * dy;
    const int x0 = static_cast<int>(std::floor(px));
    const int y0 = static_cast<int>(std::floor(py));
    const double fx = px - x0;
    const double fy = py - y0;
    w[y0 * sx + x0] += (1 - fx) * (1 - fy);
    w[y0 * sx + x0 + 1] += fx * (1 - fy);
    w[(y0 + 1) * sx + x0] += (1 - fx) * fy;
    w[(y0 + 1) * sx + x0 + 1] += fx * fy;
  }
  return FromWeights(sx, sy, std::move(w)).Trimmed();
}

Kernel Kernel::PaddedTo(int size_x, int size_y) const {
  Require(size_x >= size_x_ && size_y >= size_y_ && size_x % 2 == 1 &&
              size_y % 2 == 1,
          "kernel padding target must be odd and at least the current size");
  std::vector<double> w(static_cast<std::size_t>(size_x) * size_y, 0.0);
  const int ox = (size_x - size_x_) / 2;
  const int oy = (size_y - size_y_) / 2;
  for (int y = 0; y < size_y_; ++y) {
    for (int x = 0; x < size_x_; ++x) {
      w[(y + oy) * size_x + x + ox] = at(x, y);
    }
  }
  return Kernel(size_x, size_y, std::move(w));
}

Kernel Kernel::Trimmed() const {
  auto row_zero = [&](int y) {
    for (int x = 0; x < size_x_; ++x) {
      if (at(x, y) != 0.0) return false;
    }
    return true;
  };
  auto col_zero = [&](int x) {
    for (int y = 0; y < size_y_; ++y) {
      if (at(x, y) != 0.0) return false;
    }
    return true;
  };
  int trim_y = 0;
  while (trim_y < radius_y() && row_zero(trim_y) &&
         row_zero(size_y_ - 1 - trim_y)) {
    ++trim_y;
  }
  int trim_x = 0;
  while (trim_x < radius_x() && col_zero(trim_x) &&
         col_zero(size_x_ - 1 - trim_x)) {
    ++trim_x;
  }
  const int nx = size_x_ - 2 * trim_x;
  const int ny = size_y_ - 2 * trim_y;
  std::vector<double> w(static_cast<std::size_t>(nx) * ny);
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) w[y * nx + x] = at(x + trim_x, y + trim_y);
  }
  return Kernel(nx, ny, std::move(w));
}

int Kernel::SupportWidth() const {
  int lo = size_x_, hi = -1;
  for (int y = 0; y < size_y_; ++y) {
    for (int x = 0; x < size_x_; ++x) {
      if (at(x, y) > 0.0) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
  }
  return hi - lo + 1;
}

int Kernel::SupportHeight() const {
  int lo = size_y_, hi = -1;
  for (int y = 0; y < size_y_; ++y) {
    for (int x = 0; x < size_x_; ++x) {
      if (at(x, y) > 0.0) {
        lo = std::min(lo, y);
        hi = std::max(hi, y);
      }
    }
  }
  return hi - lo + 1;
}

namespace {

std::pair<Kernel, Kernel> CommonSize(const Kernel& a, const Kernel& b) {
  const int sx = std::max(a.size_x(), b.size_x());
  const int sy = std::max(a.size_y(), b.size_y());
  return {a.PaddedTo(sx, sy), b.PaddedTo(sx, sy)};
}

}  // namespace

double KernelL1Distance(const Kernel& a, const Kernel& b) {
  const auto [pa, pb] = CommonSize(a, b);
  double d = 0.0;
  for (std::size_t i = 0; i < pa.weights().size(); ++i) {
    d += std::abs(pa.weights()[i] - pb.weights()[i]);
  }
  return d;
}

double KernelL2Distance(const Kernel& a, const Kernel& b) {
  const auto [pa, pb] = CommonSize(a, b);
  double d = 0.0;
  for (std::size_t i = 0; i < pa.weights().size(); ++i) {
    const double e = pa.weights()[i] - pb.weights()[i];
    d += e * e;
  }
  return std::sqrt(d);
}

double KernelNcc(const Kernel& a, const Kernel& b) {
  const auto [pa, pb] = CommonSize(a, b);
  const auto wa = pa.weights();
  const auto wb = pb.weights();
  const double n = static_cast<double>(wa.size());
  const double ma = std::accumulate(wa.begin(), wa.end(), 0.0) / n;
  const double mb = std::accumulate(wb.begin(), wb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < wa.size(); ++i) {
    sab += (wa[i] - ma) * (wb[i] - mb);
    saa += (wa[i] - ma) * (wa[i] - ma);
    sbb += (wb[i] - mb) * (wb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return saa == sbb ? 1.0 : 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace yawdeblur
