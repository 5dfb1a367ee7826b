#pragma once

#include <span>
#include <vector>

namespace yawdeblur {

// A normalized, non-negative point spread function with odd dimensions.
// The anchor is the center pixel (radius_x, radius_y). Instances are
// immutable and always satisfy those invariants.
class Kernel {
 public:
  // Tolerance on the unit-sum invariant.
  static constexpr double kSumTolerance = 1e-6;
  // Negative weights down to this value are treated as round-off and zeroed.
  static constexpr double kNegativeSlack = -1e-9;

  // 1x1 identity kernel.
  Kernel();

  // Normalizes `weights` to unit sum. Rejects even dimensions, size
  // mismatch, non-finite values, negatives below kNegativeSlack, and an
  // all-zero kernel.
  static Kernel FromWeights(int size_x, int size_y, std::vector<double> weights);

  static Kernel Delta() { return Kernel(); }
  static Kernel Gaussian(int size_x, int size_y, double sigma);
  // Box of the given odd size.
  static Kernel Uniform(int size_x, int size_y);
  // Anti-aliased line segment of `length` pixels at `angle_deg`
  // (counter-clockwise from the +x axis, image y pointing down).
  static Kernel MotionLine(double length, double angle_deg);

  int size_x() const { return size_x_; }
  int size_y() const { return size_y_; }
  int radius_x() const { return size_x_ / 2; }
  int radius_y() const { return size_y_ / 2; }

  double at(int x, int y) const { return weights_[y * size_x_ + x]; }
  std::span<const double> weights() const { return weights_; }

  // Zero-padded copy centered on a larger odd canvas.
  Kernel PaddedTo(int size_x, int size_y) const;
  // Drops symmetric pairs of all-zero border rows/columns so the anchor
  // stays centered.
  Kernel Trimmed() const;
  // Horizontal / vertical extent of the non-zero support.
  int SupportWidth() const;
  int SupportHeight() const;

  friend bool operator==(const Kernel&, const Kernel&) = default;

 private:
  Kernel(int size_x, int size_y, std::vector<double> weights)
      : size_x_(size_x), size_y_(size_y), weights_(std::move(weights)) {}

  int size_x_;
  int size_y_;
  std::vector<double> weights_;
};

// Sum of |a - b| after padding both to a common centered size.
double KernelL1Distance(const Kernel& a, const Kernel& b);
// Euclidean distance after common padding.
double KernelL2Distance(const Kernel& a, const Kernel& b);
// Zero-mean normalized cross-correlation at zero shift after common padding.
double KernelNcc(const Kernel& a, const Kernel& b);

}  // namespace yawdeblur
