#include "yawdeblur/psf_analytic.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "yawdeblur/core/error.h"

namespace yawdeblur {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Snaps values within round-off of an integer so exact lattice hits put all
// their weight on one pixel.
double SnapToLattice(double v) {
  const double r = std::round(v);
  return std::abs(v - r) < 1e-9 ? r : v;
}

PixelPoint ResolveAnchor(const CameraIntrinsics& intrinsics,
                         const PsfSynthesisConfig& config) {
  const PixelPoint anchor =
      config.anchor.value_or(PixelPoint{intrinsics.cx(), intrinsics.cy()});
  const double max_x = std::max(intrinsics.width() - 1.0, intrinsics.cx());
  const double max_y = std::max(intrinsics.height() - 1.0, intrinsics.cy());
  Require(anchor.x >= 0.0 && anchor.x <= max_x && anchor.y >= 0.0 &&
              anchor.y <= max_y,
          "PSF anchor (" + std::to_string(anchor.x) + ", " +
              std::to_string(anchor.y) + ") lies outside the image");
  return anchor;
}

}  // namespace

CameraIntrinsics::CameraIntrinsics(double focal_px, int width, int height)
    : focal_px_(focal_px), width_(width), height_(height) {
  Require(std::isfinite(focal_px) && focal_px > 0.0, "focal length must be positive");
  Require(width > 0 && height > 0, "image dimensions must be positive");
}

CameraIntrinsics CameraIntrinsics::FromFov(double fov_deg, int width, int height) {
  return CameraIntrinsics(FocalFromFov(fov_deg, width, height), width, height);
}

Eigen::Matrix3d CameraIntrinsics::Matrix() const {
  Eigen::Matrix3d k;
  k << focal_px_, 0.0, cx(),
       0.0, focal_px_, cy(),
       0.0, 0.0, 1.0;
  return k;
}

void GimbalMotion::Validate() const {
  Require(std::isfinite(steering_rate_deg_s) && steering_rate_deg_s >= 0.0,
          "steering rate must be non-negative");
  Require(std::isfinite(exposure_s) && exposure_s > 0.0, "exposure must be positive");
  Require(std::isfinite(frame_rate_fps) && frame_rate_fps > 0.0,
          "frame rate must be positive");
}

double GimbalMotion::SweepRadians() const {
  return steering_rate_deg_s * exposure_s * kDegToRad;
}

double FocalFromFov(double fov_deg, double width, double height) {
  Require(fov_deg > 0.0 && fov_deg < 180.0, "field of view must lie in (0, 180) degrees");
  Require(width > 0.0 && height > 0.0, "image dimensions must be positive");
  return std::sqrt(height * height + width * width) /
         (2.0 * std::tan(fov_deg * kDegToRad / 2.0));
}

double RotationForSpread(double spread_px, double focal_px, double offset_px) {
  Require(focal_px > 0.0 && spread_px >= 0.0 && offset_px >= 0.0,
          "rotation_for_spread needs f > 0 and non-negative spread/offset");
  return spread_px * focal_px / (focal_px * focal_px + offset_px * offset_px);
}

double MaxSpread(const GimbalMotion& motion, double focal_px, double offset_px) {
  motion.Validate();
  Require(focal_px > 0.0, "focal length must be positive");
  const double sweep = motion.SweepRadians();
  return (sweep / 2.0) * (focal_px * focal_px + offset_px * offset_px) / focal_px;
}

Eigen::Matrix3d YawHomography(const CameraIntrinsics& intrinsics, double theta) {
  Require(std::abs(theta) < std::numbers::pi / 2.0, "|theta| must be below pi/2");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix3d r;
  r << c, 0.0, s,
       0.0, 1.0, 0.0,
       -s, 0.0, c;
  const Eigen::Matrix3d k = intrinsics.Matrix();
  return k * r * k.inverse();
}

std::vector<double> SampleYawAngles(const CameraIntrinsics& intrinsics,
                                    const GimbalMotion& motion,
                                    const PsfSynthesisConfig& config) {
  motion.Validate();
  Require(config.oversample >= 1, "oversample must be >= 1");
  const PixelPoint anchor = ResolveAnchor(intrinsics, config);
  const double f = intrinsics.focal_px();
  const double offset = std::abs(anchor.x - intrinsics.cx());
  const double spread = config.max_spread_override.value_or(MaxSpread(motion, f, 0.0));
  Require(std::isfinite(spread) && spread >= 0.0, "max spread must be non-negative");

  const double theta_max = RotationForSpread(spread, f, offset);
  if (theta_max == 0.0) return {0.0};
  const double step = RotationForSpread(1.0, f, offset) / config.oversample;
  // Midpoints of equal sub-intervals: equal weights, symmetric about zero,
  // and second-order accurate for the uniform sweep.
  const int intervals = std::max(1, static_cast<int>(std::ceil(2.0 * theta_max / step - 1e-9)));
  std::vector<double> angles(intervals);
  for (int i = 0; i < intervals; ++i) {
    angles[i] = -theta_max + 2.0 * theta_max * (i + 0.5) / intervals;
  }
  return angles;
}

Kernel SynthesizePsf(const CameraIntrinsics& intrinsics,
                     const GimbalMotion& motion,
                     const PsfSynthesisConfig& config) {
  const PixelPoint anchor = ResolveAnchor(intrinsics, config);
  const std::vector<double> angles = SampleYawAngles(intrinsics, motion, config);
  const double spread = config.max_spread_override.value_or(
      MaxSpread(motion, intrinsics.focal_px(), 0.0));

  const Eigen::Vector3d x(anchor.x, anchor.y, 1.0);
  std::vector<Eigen::Vector2d> shifts;
  shifts.reserve(angles.size());
  double reach = 0.0;
  for (double theta : angles) {
    const Eigen::Vector3d xp = YawHomography(intrinsics, theta) * x;
    const Eigen::Vector2d d(SnapToLattice(xp.x() / xp.z() - anchor.x),
                            SnapToLattice(xp.y() / xp.z() - anchor.y));
    reach = std::max({reach, std::abs(d.x()), std::abs(d.y())});
    shifts.push_back(d);
  }

  const int radius = std::max(static_cast<int>(std::ceil(spread)),
                              static_cast<int>(std::ceil(reach))) + 1;
  const int side = 2 * radius + 1;
  std::vector<double> canvas(static_cast<std::size_t>(side) * side, 0.0);
  const double unit = 1.0 / static_cast<double>(shifts.size());
  for (const Eigen::Vector2d& d : shifts) {
    const double px = radius + d.x();
    const double py = radius + d.y();
    const int x0 = static_cast<int>(std::floor(px));
    const int y0 = static_cast<int>(std::floor(py));
    const double fx = px - x0;
    const double fy = py - y0;
    auto splat = [&](int xi, int yi, double w) {
      if (w == 0.0) return;
      canvas[static_cast<std::size_t>(yi) * side + xi] += unit * w;
    };
    splat(x0, y0, (1.0 - fx) * (1.0 - fy));
    splat(x0 + 1, y0, fx * (1.0 - fy));
    splat(x0, y0 + 1, (1.0 - fx) * fy);
    splat(x0 + 1, y0 + 1, fx * fy);
  }
  return Kernel::FromWeights(side, side, std::move(canvas)).Trimmed();
}

Kernel PsfGrid(const CameraIntrinsics& intrinsics, const GimbalMotion& motion,
               std::span<const PixelPoint> anchors, int oversample) {
  Require(!anchors.empty(), "psf grid needs at least one anchor");
  std::vector<Kernel> kernels;
  kernels.reserve(anchors.size());
  int sx = 1, sy = 1;
  for (const PixelPoint& a : anchors) {
    PsfSynthesisConfig config;
    config.anchor = a;
    config.oversample = oversample;
    kernels.push_back(SynthesizePsf(intrinsics, motion, config));
    sx = std::max(sx, kernels.back().size_x());
    sy = std::max(sy, kernels.back().size_y());
  }
  std::vector<double> mean(static_cast<std::size_t>(sx) * sy, 0.0);
  for (const Kernel& k : kernels) {
    const Kernel padded = k.PaddedTo(sx, sy);
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += padded.weights()[i];
  }
  for (double& v : mean) v /= static_cast<double>(kernels.size());
  return Kernel::FromWeights(sx, sy, std::move(mean)).Trimmed();
}

std::vector<PixelPoint> CenterAndCorners(const CameraIntrinsics& intrinsics) {
  const double xr = intrinsics.width() - 1.0;
  const double yb = intrinsics.height() - 1.0;
  return {{intrinsics.cx(), intrinsics.cy()}, {0.0, 0.0}, {xr, 0.0},
          {0.0, yb}, {xr, yb}};
}

}  // namespace yawdeblur
