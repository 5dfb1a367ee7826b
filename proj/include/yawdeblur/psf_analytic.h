#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "yawdeblur/core/kernel.h"

namespace yawdeblur {

// Pinhole intrinsics with the principal point at the image center.
class CameraIntrinsics {
 public:
  CameraIntrinsics(double focal_px, int width, int height);
  // Focal length from the diagonal field of view.
  static CameraIntrinsics FromFov(double fov_deg, int width, int height);

  double focal_px() const { return focal_px_; }
  int width() const { return width_; }
  int height() const { return height_; }
  double cx() const { return width_ / 2.0; }
  double cy() const { return height_ / 2.0; }
  Eigen::Matrix3d Matrix() const;

 private:
  double focal_px_;
  int width_;
  int height_;
};

struct GimbalMotion {
  double steering_rate_deg_s = 0.0;
  double exposure_s = 0.005;
  double frame_rate_fps = 30.0;

  void Validate() const;
  // Total yaw swept during one exposure, radians.
  double SweepRadians() const;
};

struct PixelPoint {
  double x = 0.0;
  double y = 0.0;
};

struct PsfSynthesisConfig {
  // Defaults to the principal point.
  std::optional<PixelPoint> anchor;
  // Rotation samples per one-pixel rotation step.
  int oversample = 4;
  // Replaces the computed maximum spread, in pixels.
  std::optional<double> max_spread_override;
};

double FocalFromFov(double fov_deg, double width, double height);

// Rotation (radians) producing a spread of `spread_px` pixels at horizontal
// distance `offset_px` from the principal point.
double RotationForSpread(double spread_px, double focal_px, double offset_px);

// Half-length of the blur (pixels) for one exposure of `motion`.
double MaxSpread(const GimbalMotion& motion, double focal_px, double offset_px);

// K * R_y(theta) * K^-1.
Eigen::Matrix3d YawHomography(const CameraIntrinsics& intrinsics, double theta);

// Midpoints of equal steps spanning [-theta_max, +theta_max] for the given
// anchor; exposed so independent renderers can use the same motion model.
std::vector<double> SampleYawAngles(const CameraIntrinsics& intrinsics,
                                    const GimbalMotion& motion,
                                    const PsfSynthesisConfig& config);

Kernel SynthesizePsf(const CameraIntrinsics& intrinsics,
                     const GimbalMotion& motion,
                     const PsfSynthesisConfig& config = {});

// Per-anchor PSFs, padded to a common size, averaged and re-normalized.
Kernel PsfGrid(const CameraIntrinsics& intrinsics, const GimbalMotion& motion,
               std::span<const PixelPoint> anchors, int oversample = 4);

// Principal point plus the four corner pixels.
std::vector<PixelPoint> CenterAndCorners(const CameraIntrinsics& intrinsics);

}  // namespace yawdeblur
