#include "yawdeblur/core/image.h"

#include <cmath>
#include <numeric>
#include <string>

#include "yawdeblur/core/error.h"

namespace yawdeblur {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kTruncated: return "truncated data";
    case ErrorCode::kUnsupportedFormat: return "unsupported format";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kIllPosed: return "ill-posed problem";
    case ErrorCode::kNotFound: return "not found";
  }
  return "unknown";
}

GrayImage::GrayImage(int width, int height, double fill)
    : width_(width), height_(height) {
  Require(width > 0 && height > 0, "image dimensions must be positive");
  Require(std::isfinite(fill), "image fill value must be finite");
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  Require(width > 0 && height > 0, "image dimensions must be positive");
  Require(data_.size() == static_cast<std::size_t>(width) * height,
          "image data length " + std::to_string(data_.size()) +
              " does not match " + std::to_string(width) + "x" +
              std::to_string(height));
  Require(AllFinite(), "image data contains non-finite values");
}

double GrayImage::Sum() const {
  return std::accumulate(data_.begin(), data_.end(), 0.0);
}

double GrayImage::Mean() const {
  return data_.empty() ? 0.0 : Sum() / static_cast<double>(data_.size());
}

bool GrayImage::AllFinite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

GrayImage GrayImage::Crop(int x0, int y0, int w, int h) const {
  Require(x0 >= 0 && y0 >= 0 && w > 0 && h > 0 && x0 + w <= width_ &&
              y0 + h <= height_,
          "crop rectangle outside image");
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) out.at(x, y) = at(x0 + x, y0 + y);
  }
  return out;
}

}  // namespace yawdeblur
