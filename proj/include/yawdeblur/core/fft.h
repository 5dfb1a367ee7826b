#pragma once

#include <complex>
#include <span>
#include <vector>

#include "yawdeblur/core/image.h"
#include "yawdeblur/core/kernel.h"

// Real 2-D transforms on top of FFTW. Plans and scratch buffers are cached
// per thread, so concurrent callers never share mutable FFT state.
namespace yawdeblur::fft {

// Smallest n' >= n whose only prime factors are 2, 3, 5 and 7.
int NextFastSize(int n);

// Half-plane spectrum of a width x height real signal:
// height rows of (width/2 + 1) bins.
struct Spectrum {
  int width = 0;
  int height = 0;
  std::vector<std::complex<double>> bins;

  int bins_x() const { return width / 2 + 1; }
  std::complex<double>& at(int u, int v) { return bins[v * bins_x() + u]; }
  std::complex<double> at(int u, int v) const { return bins[v * bins_x() + u]; }
};

Spectrum Forward(const GrayImage& image);
// Normalized inverse: Inverse(Forward(x)) == x up to round-off.
GrayImage Inverse(const Spectrum& spectrum);

// Transfer function of a filter on a periodic width x height grid, with the
// filter's anchor tap moved to the origin. Filter must fit the grid.
Spectrum TransferFunction(std::span<const double> taps, int size_x, int size_y,
                          int anchor_x, int anchor_y, int width, int height);
Spectrum TransferFunction(const Kernel& kernel, int width, int height);

}  // namespace yawdeblur::fft
