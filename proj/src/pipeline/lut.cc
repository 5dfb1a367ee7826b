#include "yawdeblur/pipeline/lut.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "yawdeblur/core/error.h"
#include "yawdeblur/core/image_io.h"
#include "yawdeblur/core/kernel_io.h"

namespace yawdeblur {

std::string_view ProvenanceName(Provenance provenance) {
  return provenance == Provenance::kAnalytic ? "analytic" : "blur-sharp-pair";
}

Provenance ParseProvenance(std::string_view name) {
  if (name == "analytic") return Provenance::kAnalytic;
  if (name == "blur-sharp-pair") return Provenance::kBlurSharpPair;
  Fail(ErrorCode::kParse, "unknown provenance '" + std::string(name) + "'");
}

long long PsfLut::RateKey(double steering_rate_deg_s) {
  Require(std::isfinite(steering_rate_deg_s) && steering_rate_deg_s >= 0.0,
          "steering rate must be finite and non-negative");
  return std::llround(steering_rate_deg_s * 10.0);
}

void PsfLut::Insert(double steering_rate_deg_s, Kernel kernel, Provenance provenance) {
  entries_.insert_or_assign(RateKey(steering_rate_deg_s),
                            LutEntry{std::move(kernel), provenance});
}

bool PsfLut::Contains(double steering_rate_deg_s) const {
  return entries_.contains(RateKey(steering_rate_deg_s));
}

const LutEntry& PsfLut::Lookup(double steering_rate_deg_s) const {
  const auto it = entries_.find(RateKey(steering_rate_deg_s));
  if (it == entries_.end()) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.1f", steering_rate_deg_s);
    Fail(ErrorCode::kNotFound, std::string("no PSF stored for steering rate ") + buf +
                                   " deg/s");
  }
  return it->second;
}

std::vector<double> PsfLut::Rates() const {
  std::vector<double> rates;
  for (const auto& [key, entry] : entries_) rates.push_back(key / 10.0);
  return rates;
}

void PsfLut::Save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  nlohmann::json index;
  index["camera_id"] = camera_id_;
  index["entries"] = nlohmann::json::array();
  for (const auto& [key, entry] : entries_) {
    char name[48];
    std::snprintf(name, sizeof(name), "psf_%lld.%lld.txt", key / 10, key % 10);
    SaveKernel(entry.kernel, dir / name);
    index["entries"].push_back({
        {"steering_rate_deg_s", key / 10.0},
        {"kernel_file", name},
        {"provenance", ProvenanceName(entry.provenance)},
    });
  }
  std::ofstream out(dir / "index.json");
  if (!out) Fail(ErrorCode::kIo, "cannot write LUT index in " + dir.string());
  out << index.dump(2) << '\n';
}

PsfLut PsfLut::Load(const std::filesystem::path& dir) {
  std::ifstream in(dir / "index.json");
  if (!in) Fail(ErrorCode::kIo, "cannot open LUT index in " + dir.string());
  nlohmann::json index;
  try {
    in >> index;
    PsfLut lut(index.value("camera_id", std::string()));
    for (const auto& e : index.at("entries")) {
      lut.Insert(e.at("steering_rate_deg_s").get<double>(),
                 LoadKernel(dir / e.at("kernel_file").get<std::string>()),
                 ParseProvenance(e.at("provenance").get<std::string>()));
    }
    return lut;
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kParse, "malformed LUT index: " + std::string(e.what()));
  }
}

PsfLut BuildLutAnalytic(const CameraIntrinsics& intrinsics,
                        std::span<const GimbalMotion> motions,
                        std::string camera_id, int oversample) {
  PsfLut lut(std::move(camera_id));
  const std::vector<PixelPoint> anchors = CenterAndCorners(intrinsics);
  for (const GimbalMotion& m : motions) {
    lut.Insert(m.steering_rate_deg_s, PsfGrid(intrinsics, m, anchors, oversample),
               Provenance::kAnalytic);
  }
  return lut;
}

PsfLut BuildLutFromPairs(const std::filesystem::path& frame_dir,
                         std::span<const GimbalMotion> motions,
                         const EstimationConfig& estimation, std::string camera_id,
                         std::vector<std::string>* log) {
  PsfLut lut(std::move(camera_id));
  const auto frames = ListFrames(frame_dir);
  const int total = static_cast<int>(frames.size());
  for (const GimbalMotion& m : motions) {
    const int count = FramesForSteering(m);
    if (count > total) {
      if (log) {
        log->push_back("steering rate " + std::to_string(m.steering_rate_deg_s) +
                       " deg/s needs " + std::to_string(count) + " frames, only " +
                       std::to_string(total) + " available; entry omitted");
      }
      continue;
    }
    const int first = (total - count) / 2;
    std::vector<GrayImage> stack;
    for (int i = first; i < first + count; ++i) stack.push_back(LoadImage(frames[i]));
    const BlurSharpPair pair = AverageFrames(stack, PairSpec(count));
    lut.Insert(m.steering_rate_deg_s, EstimateKernel(pair.blurred, pair.sharp, estimation),
               Provenance::kBlurSharpPair);
    if (log) {
      log->push_back("steering rate " + std::to_string(m.steering_rate_deg_s) +
                     " deg/s: estimated from frames " + std::to_string(first) + ".." +
                     std::to_string(first + count - 1));
    }
  }
  return lut;
}

}  // namespace yawdeblur
