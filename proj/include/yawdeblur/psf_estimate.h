#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "yawdeblur/core/image.h"
#include "yawdeblur/core/kernel.h"
#include "yawdeblur/psf_analytic.h"

namespace yawdeblur {

// How many consecutive slow-pan frames are averaged into one blurred frame.
class PairSpec {
 public:
  explicit PairSpec(int frame_count);

  int frame_count() const { return frame_count_; }
  // 1-based index of the frame used as the sharp reference: the middle frame
  // for odd counts, N/2 + 1 for even counts.
  int center_index() const { return frame_count_ / 2 + 1; }

 private:
  int frame_count_;
};

enum class KernelInit { kUniform, kDelta };

struct EstimationConfig {
  int kernel_size = 31;
  int max_iters = 100;
  // Stop once a projection step lowers the residual norm by less than this
  // fraction.
  double tol = 1e-6;
  KernelInit init = KernelInit::kUniform;
};

struct EstimationTrace {
  // Residual ||B - L*k|| over the interior: initial guess then each
  // accepted iteration.
  std::vector<double> residuals;
  int iterations = 0;
  // Conjugate-gradient runs started, one after each projection phase.
  int restarts = 0;
  // Worst |sum(k) - 1| and smallest weight seen over all iterates.
  double max_sum_error = 0.0;
  double min_weight = 0.0;
};

struct BlurSharpPair {
  GrayImage blurred;
  GrayImage sharp;
};

// N = round(frame_rate * exposure * steering_rate), the number of 1 deg/s
// frames whose average matches one exposure at `steering_rate`. Half-up
// rounding, clamped to >= 1.
int FramesForSteering(const GimbalMotion& motion);

BlurSharpPair AverageFrames(std::span<const GrayImage> frames, const PairSpec& spec);

// Solves min ||B - L*k|| subject to sum(k) = 1, k >= 0 with projected
// conjugate gradients. Only pixels at least kernel_size/2 from the border
// enter the residual.
Kernel EstimateKernel(const GrayImage& blurred, const GrayImage& sharp,
                      const EstimationConfig& config = {},
                      EstimationTrace* trace = nullptr);

struct PairWindow {
  int first = 0;  // 0-based index of the first frame in the window
  int count = 0;
};

// Windows [first, first + count) advancing by `stride` while they fit.
std::vector<PairWindow> PlanPairWindows(int frame_total, int frame_count, int stride);

// Image files in `dir`, ordered by the number embedded in the file name.
std::vector<std::filesystem::path> ListFrames(const std::filesystem::path& dir);

struct PairDatasetOptions {
  // Window advance; 0 means "use N" (non-overlapping windows).
  int stride = 0;
  // Replaces FramesForSteering for every motion.
  std::optional<int> frame_count_override;
};

struct PairDatasetSummary {
  int pairs_written = 0;
  int motions_skipped = 0;
  std::filesystem::path manifest;
};

// Writes blur/sharp PGM pairs under out_dir and a JSON-lines manifest
// (manifest.jsonl) with one record per pair and one warning record per
// motion that could not be served.
PairDatasetSummary BuildPairDataset(const std::filesystem::path& frame_dir,
                                    std::span<const GimbalMotion> motions,
                                    const std::filesystem::path& out_dir,
                                    const PairDatasetOptions& options = {});

}  // namespace yawdeblur
