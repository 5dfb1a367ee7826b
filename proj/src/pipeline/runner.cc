#include "yawdeblur/pipeline/runner.h"

#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "yawdeblur/core/error.h"
#include "yawdeblur/psf_estimate.h"

namespace yawdeblur {

nlohmann::json TimingReport::ToJson() const {
  nlohmann::json j;
  j["method"] = method;
  j["workers"] = workers;
  j["frame_count"] = frames.size();
  j["wall_seconds"] = wall_seconds;
  j["fps"] = fps;
  j["machine_note"] = machine_note;
  j["frames"] = nlohmann::json::array();
  for (const FrameTiming& f : frames) {
    j["frames"].push_back({{"frame", f.frame}, {"method", f.method}, {"ms", f.ms}});
  }
  j["failures"] = nlohmann::json::array();
  for (const FrameFailure& f : failures) {
    j["failures"].push_back({{"frame", f.frame}, {"error", f.error}});
  }
  return j;
}

std::string MachineNote() {
  return "hardware_concurrency=" + std::to_string(std::thread::hardware_concurrency());
}

double ParallelFor(std::size_t count, int workers,
                   const std::function<void(std::size_t)>& task) {
  Require(workers >= 1, "workers must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto loop = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  const int spawn = static_cast<int>(std::min<std::size_t>(workers, count));
  if (spawn <= 1) {
    loop();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(spawn);
    for (int w = 0; w < spawn; ++w) pool.emplace_back(loop);
  }
  if (error) std::rethrow_exception(error);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

namespace {

std::map<std::size_t, double> LoadRateSidecar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open rate sidecar " + path.string());
  std::map<std::size_t, double> rates;
  try {
    nlohmann::json j;
    in >> j;
    for (const auto& [key, value] : j.items()) {
      rates[std::stoul(key)] = value.get<double>();
    }
  } catch (const std::exception& e) {
    Fail(ErrorCode::kParse, "malformed rate sidecar " + path.string() + ": " + e.what());
  }
  return rates;
}

}  // namespace

TimingReport RunPipeline(const PipelineConfig& cfg, const PsfLut& lut) {
  Require(cfg.workers >= 1, "workers must be >= 1");
  Require(!cfg.output_dir.empty(), "output directory required");
  const auto frames = ListFrames(cfg.input_dir);
  if (std::filesystem::exists(cfg.output_dir)) {
    Require(!std::filesystem::equivalent(cfg.input_dir, cfg.output_dir),
            "output directory must differ from the input directory");
  }

  std::vector<double> rates(frames.size(), cfg.steering_rate_deg_s);
  if (cfg.rate_sidecar) {
    for (const auto& [index, rate] : LoadRateSidecar(*cfg.rate_sidecar)) {
      if (index < rates.size()) rates[index] = rate;
    }
  }
  // Every rate must resolve before any frame is processed.
  std::set<long long> needed;
  for (double r : rates) needed.insert(PsfLut::RateKey(r));
  if (frames.empty()) needed.insert(PsfLut::RateKey(cfg.steering_rate_deg_s));
  for (long long key : needed) lut.Lookup(key / 10.0);

  std::filesystem::create_directories(cfg.output_dir);
  const std::string method(MethodName(cfg.deblur.method));
  std::vector<std::optional<FrameTiming>> timings(frames.size());
  std::vector<std::optional<FrameFailure>> failures(frames.size());

  const double wall = ParallelFor(frames.size(), cfg.workers, [&](std::size_t i) {
    const std::string name = frames[i].filename().string();
    try {
      const GrayImage frame = LoadImage(frames[i]);
      const DeblurResult result = Deblur(frame, lut.Lookup(rates[i]).kernel, cfg.deblur);
      SaveImage(result.image, cfg.output_dir / frames[i].filename(), cfg.output_depth);
      timings[i] = FrameTiming{name, method, result.ms};
    } catch (const Error& e) {
      failures[i] = FrameFailure{name, e.what()};
    }
  });

  TimingReport report;
  report.workers = cfg.workers;
  report.method = method;
  report.wall_seconds = wall;
  report.machine_note = MachineNote();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (timings[i]) report.frames.push_back(*timings[i]);
    if (failures[i]) report.failures.push_back(*failures[i]);
  }
  report.fps = wall > 0.0 ? static_cast<double>(report.frames.size()) / wall : 0.0;

  if (cfg.report_path) {
    std::ofstream out(*cfg.report_path);
    if (!out) Fail(ErrorCode::kIo, "cannot write report " + cfg.report_path->string());
    out << report.ToJson().dump(2) << '\n';
  }
  return report;
}

}  // namespace yawdeblur
