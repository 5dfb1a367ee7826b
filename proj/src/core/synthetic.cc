#include "yawdeblur/core/synthetic.h"

#include <algorithm>
#include <cmath>
#include <random>

namespace yawdeblur {

GrayImage SyntheticScene(int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  GrayImage img(width, height);

  const double gx = unit(rng) - 0.5;
  const double gy = unit(rng) - 0.5;
  const double base = 0.3 + 0.4 * unit(rng);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      img.at(x, y) = base + 0.2 * (gx * x / width + gy * y / height);
    }
  }

  const int shapes = 12 + static_cast<int>(width * height / 6000);
  for (int s = 0; s < shapes; ++s) {
    const double cx = unit(rng) * width;
    const double cy = unit(rng) * height;
    const double rx = 3.0 + unit(rng) * width / 8.0;
    const double ry = 3.0 + unit(rng) * height / 8.0;
    const double value = 0.1 + 0.8 * unit(rng);
    const bool ellipse = unit(rng) < 0.5;
    const int x0 = std::max(0, static_cast<int>(cx - rx));
    const int x1 = std::min(width - 1, static_cast<int>(cx + rx));
    const int y0 = std::max(0, static_cast<int>(cy - ry));
    const int y1 = std::min(height - 1, static_cast<int>(cy + ry));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double u = (x - cx) / rx;
        const double v = (y - cy) / ry;
        if (!ellipse || u * u + v * v <= 1.0) img.at(x, y) = value;
      }
    }
  }

  // Thin vertical and diagonal strokes carry the horizontal detail that
  // yaw blur destroys.
  const int strokes = 6 + width / 40;
  for (int s = 0; s < strokes; ++s) {
    const double x0 = unit(rng) * width;
    const double slope = (unit(rng) - 0.5) * 0.6;
    const double value = unit(rng) < 0.5 ? 0.1 : 0.9;
    const int thickness = 1 + static_cast<int>(unit(rng) * 3);
    const int ya = static_cast<int>(unit(rng) * height / 2);
    const int yb = std::min(height, ya + height / 4 + static_cast<int>(unit(rng) * height / 2));
    for (int y = ya; y < yb; ++y) {
      const int xc = static_cast<int>(x0 + slope * (y - ya));
      for (int t = 0; t < thickness; ++t) {
        const int x = xc + t;
        if (x >= 0 && x < width) img.at(x, y) = value;
      }
    }
  }

  std::normal_distribution<double> texture(0.0, 0.02);
  for (double& v : img.pixels()) v = std::clamp(v + texture(rng), 0.05, 0.95);
  return img;
}

}  // namespace yawdeblur
