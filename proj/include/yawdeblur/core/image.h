#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace yawdeblur {

// Single-channel double-precision raster, row-major. Values are nominally
// in [0,1] after load but nothing clamps them until save time.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, double fill = 0.0);
  // Rejects size mismatch and non-finite values.
  GrayImage(int width, int height, std::vector<double> data);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(int x, int y) { return data_[Index(x, y)]; }
  double at(int x, int y) const { return data_[Index(x, y)]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> pixels() { return data_; }
  std::span<const double> pixels() const { return data_; }

  bool SameShape(const GrayImage& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  double Sum() const;
  double Mean() const;
  bool AllFinite() const;

  // Copy of the rectangle [x0, x0+w) x [y0, y0+h); must lie inside.
  GrayImage Crop(int x0, int y0, int w, int h) const;

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t Index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

}  // namespace yawdeblur
