#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "yawdeblur/core/kernel.h"
#include "yawdeblur/deconv/deconv.h"

namespace yawdeblur {

struct BenchConfig {
  std::vector<DeblurSettings> methods;
  Kernel kernel;
  int workers = 1;
  // Frames per protocol: a 30 fps second of live video, and an already
  // recorded clip.
  int streaming_frames = 30;
  int batch_frames = 312;
  int width = 558;
  int height = 481;
  // Distinct synthetic frames cycled through the run.
  int frame_pool = 4;
  std::uint64_t seed = 1;
};

struct BenchRow {
  std::string method;
  std::string protocol;  // "streaming" or "batch"
  int frames = 0;
  int workers = 1;
  double total_s = 0.0;
  double ms_per_frame = 0.0;
  double fps = 0.0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  // Soft expectations that did not hold (e.g. method ordering).
  std::vector<std::string> warnings;

  std::string ToCsv() const;
};

BenchResult RunBench(const BenchConfig& config);

}  // namespace yawdeblur
