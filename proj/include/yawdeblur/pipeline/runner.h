#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "yawdeblur/core/image_io.h"
#include "yawdeblur/deconv/deconv.h"
#include "yawdeblur/pipeline/lut.h"

namespace yawdeblur {

struct PipelineConfig {
  int workers = 1;
  DeblurSettings deblur;
  std::filesystem::path input_dir;
  std::filesystem::path output_dir;
  double steering_rate_deg_s = 0.0;
  // Optional JSON object {"<frame index>": rate}; unlisted frames use
  // steering_rate_deg_s.
  std::optional<std::filesystem::path> rate_sidecar;
  std::optional<std::filesystem::path> report_path;
  BitDepth output_depth = BitDepth::k16;
};

struct FrameTiming {
  std::string frame;
  std::string method;
  double ms = 0.0;
};

struct FrameFailure {
  std::string frame;
  std::string error;
};

struct TimingReport {
  std::vector<FrameTiming> frames;  // in input order
  std::vector<FrameFailure> failures;
  int workers = 1;
  std::string method;
  double wall_seconds = 0.0;
  double fps = 0.0;
  std::string machine_note;

  nlohmann::json ToJson() const;
};

std::string MachineNote();

// Runs task(i) for every i in [0, count) on a pool of `workers` threads
// pulling from a shared counter. Returns wall-clock seconds.
double ParallelFor(std::size_t count, int workers,
                   const std::function<void(std::size_t)>& task);

// Deblurs every frame of cfg.input_dir into cfg.output_dir under the same
// file name. Fails with kNotFound before touching any frame if a needed
// rate is missing from the LUT; unreadable frames are reported and skipped.
TimingReport RunPipeline(const PipelineConfig& cfg, const PsfLut& lut);

}  // namespace yawdeblur
