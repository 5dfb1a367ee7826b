#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "yawdeblur/core/kernel.h"
#include "yawdeblur/psf_analytic.h"
#include "yawdeblur/psf_estimate.h"

namespace yawdeblur {

enum class Provenance { kAnalytic, kBlurSharpPair };

std::string_view ProvenanceName(Provenance provenance);
Provenance ParseProvenance(std::string_view name);

struct LutEntry {
  Kernel kernel;
  Provenance provenance = Provenance::kAnalytic;
};

// Steering rate (deg/s, keyed at 0.1 resolution) -> PSF. Lookups never
// interpolate: a rate that was not stored is a kNotFound error.
//
// On disk a LUT is a directory holding index.json
//   {"camera_id": ..., "entries": [{"steering_rate_deg_s", "kernel_file",
//    "provenance"}, ...]}
// next to one kernel text file per entry.
class PsfLut {
 public:
  explicit PsfLut(std::string camera_id = "") : camera_id_(std::move(camera_id)) {}

  static long long RateKey(double steering_rate_deg_s);

  void Insert(double steering_rate_deg_s, Kernel kernel, Provenance provenance);
  bool Contains(double steering_rate_deg_s) const;
  const LutEntry& Lookup(double steering_rate_deg_s) const;

  std::vector<double> Rates() const;
  std::size_t size() const { return entries_.size(); }
  const std::string& camera_id() const { return camera_id_; }

  void Save(const std::filesystem::path& dir) const;
  static PsfLut Load(const std::filesystem::path& dir);

 private:
  std::string camera_id_;
  std::map<long long, LutEntry> entries_;
};

// Center-and-corner averaged analytic PSF per motion.
PsfLut BuildLutAnalytic(const CameraIntrinsics& intrinsics,
                        std::span<const GimbalMotion> motions,
                        std::string camera_id, int oversample = 4);

// Kernel estimated from the middle blur-sharp window of a 1 deg/s sequence.
// Motions needing more frames than available are omitted and noted in
// `log`.
PsfLut BuildLutFromPairs(const std::filesystem::path& frame_dir,
                         std::span<const GimbalMotion> motions,
                         const EstimationConfig& estimation, std::string camera_id,
                         std::vector<std::string>* log = nullptr);

}  // namespace yawdeblur
