#include "yawdeblur/core/fft.h"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "yawdeblur/core/error.h"

namespace yawdeblur::fft {

namespace {

// FFTW's planner is not reentrant; execution on distinct plans is.
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

class Plan {
 public:
  Plan(int width, int height) : width_(width), height_(height) {
    const std::size_t n_real = static_cast<std::size_t>(width) * height;
    const std::size_t n_cplx = static_cast<std::size_t>(width / 2 + 1) * height;
    real_ = fftw_alloc_real(n_real);
    cplx_ = fftw_alloc_complex(n_cplx);
    std::lock_guard<std::mutex> lock(PlannerMutex());
    // FFTW_ESTIMATE yields the same plan on every call, which keeps results
    // bit-identical across threads and runs.
    forward_ = fftw_plan_dft_r2c_2d(height, width, real_, cplx_, FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_2d(height, width, cplx_, real_, FFTW_ESTIMATE);
  }

  ~Plan() {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
    fftw_free(real_);
    fftw_free(cplx_);
  }

  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;

  Spectrum Forward(std::span<const double> pixels) {
    std::memcpy(real_, pixels.data(), pixels.size() * sizeof(double));
    fftw_execute(forward_);
    Spectrum s;
    s.width = width_;
    s.height = height_;
    s.bins.resize(static_cast<std::size_t>(width_ / 2 + 1) * height_);
    std::memcpy(static_cast<void*>(s.bins.data()), cplx_, s.bins.size() * sizeof(fftw_complex));
    return s;
  }

  GrayImage Inverse(const Spectrum& s) {
    std::memcpy(cplx_, s.bins.data(), s.bins.size() * sizeof(fftw_complex));
    fftw_execute(inverse_);
    const std::size_t n = static_cast<std::size_t>(width_) * height_;
    const double scale = 1.0 / static_cast<double>(n);
    std::vector<double> out(real_, real_ + n);
    for (double& v : out) v *= scale;
    return GrayImage(width_, height_, std::move(out));
  }

 private:
  int width_;
  int height_;
  double* real_ = nullptr;
  fftw_complex* cplx_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

Plan& PlanFor(int width, int height) {
  thread_local std::map<std::pair<int, int>, std::unique_ptr<Plan>> cache;
  auto& slot = cache[{width, height}];
  if (!slot) slot = std::make_unique<Plan>(width, height);
  return *slot;
}

bool IsSmooth(int n) {
  for (int p : {2, 3, 5, 7}) {
    while (n % p == 0) n /= p;
  }
  return n == 1;
}

}  // namespace

int NextFastSize(int n) {
  Require(n > 0, "fft size must be positive");
  while (!IsSmooth(n)) ++n;
  return n;
}

Spectrum Forward(const GrayImage& image) {
  Require(!image.empty(), "cannot transform an empty image");
  return PlanFor(image.width(), image.height()).Forward(image.pixels());
}

GrayImage Inverse(const Spectrum& spectrum) {
  Require(spectrum.width > 0 && spectrum.height > 0 &&
              spectrum.bins.size() ==
                  static_cast<std::size_t>(spectrum.bins_x()) * spectrum.height,
          "malformed spectrum");
  return PlanFor(spectrum.width, spectrum.height).Inverse(spectrum);
}

Spectrum TransferFunction(std::span<const double> taps, int size_x, int size_y,
                          int anchor_x, int anchor_y, int width, int height) {
  Require(size_x <= width && size_y <= height,
          "filter larger than transform grid");
  GrayImage grid(width, height, 0.0);
  for (int y = 0; y < size_y; ++y) {
    const int gy = ((y - anchor_y) % height + height) % height;
    for (int x = 0; x < size_x; ++x) {
      const int gx = ((x - anchor_x) % width + width) % width;
      grid.at(gx, gy) += taps[y * size_x + x];
    }
  }
  return Forward(grid);
}

Spectrum TransferFunction(const Kernel& kernel, int width, int height) {
  return TransferFunction(kernel.weights(), kernel.size_x(), kernel.size_y(),
                          kernel.radius_x(), kernel.radius_y(), width, height);
}

}  // namespace yawdeblur::fft
