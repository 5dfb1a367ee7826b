#include "test_support.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <unistd.h>

namespace yawdeblur::testing {

GrayImage RandomImage(int width, int height, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  GrayImage img(width, height);
  for (double& v : img.pixels()) v = dist(rng);
  return img;
}

namespace {

int Wrap(int i, int n, Boundary boundary) {
  switch (boundary) {
    case Boundary::kReplicate:
      return std::clamp(i, 0, n - 1);
    case Boundary::kPeriodic:
      while (i < 0) i += n;
      while (i >= n) i -= n;
      return i;
    case Boundary::kSymmetric:
      // Reflect repeatedly until inside.
      while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - i - 1;
      }
      return i;
  }
  return i;
}

}  // namespace

GrayImage ConvolveOracle(const GrayImage& image, const Kernel& kernel, Boundary boundary) {
  GrayImage out(image.width(), image.height(), 0.0);
  const int rx = kernel.radius_x();
  const int ry = kernel.radius_y();
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      double acc = 0.0;
      // out(p) = sum_q k(q) in(p - q), q relative to the anchor.
      for (int qy = -ry; qy <= ry; ++qy) {
        for (int qx = -rx; qx <= rx; ++qx) {
          const int sx = Wrap(x - qx, image.width(), boundary);
          const int sy = Wrap(y - qy, image.height(), boundary);
          acc += kernel.at(qx + rx, qy + ry) * image.at(sx, sy);
        }
      }
      out.at(x, y) = acc;
    }
  }
  return out;
}

std::vector<std::complex<double>> NaiveDft(const std::vector<double>& data, int width,
                                           int height) {
  std::vector<std::complex<double>> out(static_cast<std::size_t>(width) * height);
  for (int v = 0; v < height; ++v) {
    for (int u = 0; u < width; ++u) {
      std::complex<double> acc = 0.0;
      for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
          const double phase =
              -2.0 * std::numbers::pi * (static_cast<double>(u) * x / width +
                                         static_cast<double>(v) * y / height);
          acc += data[y * width + x] * std::polar(1.0, phase);
        }
      }
      out[v * width + u] = acc;
    }
  }
  return out;
}

std::vector<double> KernelOnGrid(const Kernel& kernel, int width, int height) {
  std::vector<double> grid(static_cast<std::size_t>(width) * height, 0.0);
  for (int j = 0; j < kernel.size_y(); ++j) {
    for (int i = 0; i < kernel.size_x(); ++i) {
      const int gx = Wrap(i - kernel.radius_x(), width, Boundary::kPeriodic);
      const int gy = Wrap(j - kernel.radius_y(), height, Boundary::kPeriodic);
      grid[gy * width + gx] += kernel.at(i, j);
    }
  }
  return grid;
}

Kernel PsfByWarping(double focal_px, int width, int height, double steering_rate_deg_s,
                    double exposure_s, int anchor_x, int anchor_y,
                    int samples_per_pixel) {
  const double cx = width / 2.0;
  const double cy = height / 2.0;
  Eigen::Matrix3d k;
  k << focal_px, 0, cx, 0, focal_px, cy, 0, 0, 1;
  // Half the swept angle, spread in pixels at the center, and the angle
  // that produces that spread at this anchor's horizontal offset.
  const double sweep = steering_rate_deg_s * exposure_s * std::numbers::pi / 180.0;
  const double spread = 0.5 * sweep * focal_px;
  const double d = anchor_x - cx;
  const double theta_max = spread * focal_px / (focal_px * focal_px + d * d);
  const int radius = static_cast<int>(std::ceil(spread)) + 3;
  const int side = 2 * radius + 1;
  const int n = std::max(1, static_cast<int>(std::ceil(2.0 * spread * samples_per_pixel)));

  std::vector<double> acc(static_cast<std::size_t>(side) * side, 0.0);
  for (int s = 0; s <= n; ++s) {
    const double theta = n == 0 ? 0.0 : -theta_max + 2.0 * theta_max * s / n;
    Eigen::Matrix3d r;
    r << std::cos(theta), 0, std::sin(theta), 0, 1, 0, -std::sin(theta), 0, std::cos(theta);
    const Eigen::Matrix3d inv = (k * r * k.inverse()).inverse();
    // Warped image at p is the impulse image sampled at H^-1 p.
    for (int wy = 0; wy < side; ++wy) {
      for (int wx = 0; wx < side; ++wx) {
        const Eigen::Vector3d p(anchor_x - radius + wx, anchor_y - radius + wy, 1.0);
        const Eigen::Vector3d q = inv * p;
        const double qx = q.x() / q.z() - anchor_x;
        const double qy = q.y() / q.z() - anchor_y;
        const double tx = std::max(0.0, 1.0 - std::abs(qx));
        const double ty = std::max(0.0, 1.0 - std::abs(qy));
        acc[wy * side + wx] += tx * ty;
      }
    }
  }
  return Kernel::FromWeights(side, side, std::move(acc)).Trimmed();
}

double GridSearchShrink(double v, double beta, double p, double lo, double hi,
                        double step) {
  double best_w = 0.0;
  double best = std::numeric_limits<double>::infinity();
  const long steps = std::lround((hi - lo) / step);
  for (long i = 0; i <= steps; ++i) {
    const double w = lo + i * step;
    const double f = std::pow(std::abs(w), p) + 0.5 * beta * (w - v) * (w - v);
    if (f < best) {
      best = f;
      best_w = w;
    }
  }
  return best_w;
}

std::vector<double> TaperWeightsOracle(const Kernel& k, int n, bool horizontal) {
  const int taps = horizontal ? k.size_x() : k.size_y();
  std::vector<double> proj(taps, 0.0);
  for (int y = 0; y < k.size_y(); ++y)
    for (int x = 0; x < k.size_x(); ++x) proj[horizontal ? x : y] += k.at(x, y);
  auto ac = [&](int lag) {
    double s = 0.0;
    for (int i = 0; i < taps; ++i)
      if (i + lag >= 0 && i + lag < taps) s += proj[i] * proj[i + lag];
    return s;
  };
  std::vector<double> w(n);
  for (int i = 0; i < n - 1; ++i) w[i] = 1.0 - (ac(i) + ac(i - (n - 1))) / ac(0);
  w[n - 1] = w[0];
  return w;
}

double Rms(const GrayImage& a, const GrayImage& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc / static_cast<double>(a.size()));
}

double MaxAbsDiff(const GrayImage& a, const GrayImage& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

CameraIntrinsics GimbalCamera() { return CameraIntrinsics::FromFov(8.0, 558, 481); }

GimbalMotion Motion(double steering_rate_deg_s) {
  GimbalMotion m;
  m.steering_rate_deg_s = steering_rate_deg_s;
  m.exposure_s = 0.005;
  m.frame_rate_fps = 30.0;
  return m;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("yawdeblur_test_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter.fetch_add(1)));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace yawdeblur::testing
