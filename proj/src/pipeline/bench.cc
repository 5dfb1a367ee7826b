#include "yawdeblur/pipeline/bench.h"

#include <cstdio>
#include <map>

#include "yawdeblur/core/convolve.h"
#include "yawdeblur/core/error.h"
#include "yawdeblur/core/synthetic.h"
#include "yawdeblur/pipeline/runner.h"

namespace yawdeblur {

std::string BenchResult::ToCsv() const {
  std::string out = "method,protocol,frames,workers,total_s,ms_per_frame,fps\n";
  char buf[256];
  for (const BenchRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%d,%d,%.6f,%.3f,%.3f\n", r.method.c_str(),
                  r.protocol.c_str(), r.frames, r.workers, r.total_s, r.ms_per_frame,
                  r.fps);
    out += buf;
  }
  return out;
}

BenchResult RunBench(const BenchConfig& config) {
  Require(!config.methods.empty(), "bench needs at least one method");
  Require(config.frame_pool >= 1, "frame pool must be >= 1");
  Require(config.streaming_frames >= 0 && config.batch_frames >= 0,
          "frame counts must be non-negative");

  std::vector<GrayImage> pool;
  for (int i = 0; i < config.frame_pool; ++i) {
    pool.push_back(Convolve(SyntheticScene(config.width, config.height, config.seed + i),
                            config.kernel, Boundary::kSymmetric));
  }

  BenchResult result;
  std::map<std::string, double> streaming_ms;
  for (const DeblurSettings& settings : config.methods) {
    const std::string method(MethodName(settings.method));
    for (const auto& [protocol, frames] :
         {std::pair<std::string, int>{"streaming", config.streaming_frames},
          std::pair<std::string, int>{"batch", config.batch_frames}}) {
      if (frames == 0) continue;
      const double wall = ParallelFor(frames, config.workers, [&](std::size_t i) {
        Deblur(pool[i % pool.size()], config.kernel, settings);
      });
      BenchRow row;
      row.method = method;
      row.protocol = protocol;
      row.frames = frames;
      row.workers = config.workers;
      row.total_s = wall;
      row.ms_per_frame = wall * 1000.0 / frames;
      row.fps = wall > 0.0 ? frames / wall : 0.0;
      if (protocol == "streaming") streaming_ms[method] = row.ms_per_frame;
      result.rows.push_back(row);
    }
  }

  // Expected cost ordering: wiener < rl < hyperlap.
  const std::vector<std::string> order = {"wiener", "rl", "hyperlap"};
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const auto a = streaming_ms.find(order[i]);
    const auto b = streaming_ms.find(order[i + 1]);
    if (a != streaming_ms.end() && b != streaming_ms.end() && !(a->second < b->second)) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "expected %s (%.2f ms) faster than %s (%.2f ms)",
                    order[i].c_str(), a->second, order[i + 1].c_str(), b->second);
      result.warnings.push_back(buf);
    }
  }
  return result;
}

}  // namespace yawdeblur
