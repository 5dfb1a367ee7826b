#include "yawdeblur/psf_estimate.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <string>

#include "json.hpp"

#include "yawdeblur/core/error.h"
#include "yawdeblur/core/fft.h"
#include "yawdeblur/core/image_io.h"

namespace yawdeblur {

PairSpec::PairSpec(int frame_count) : frame_count_(frame_count) {
  Require(frame_count >= 1, "frame count must be >= 1");
}

int FramesForSteering(const GimbalMotion& motion) {
  motion.Validate();
  // Frames at 1 deg/s that sweep the same angle as one exposure.
  const double frames = motion.frame_rate_fps * motion.exposure_s * motion.steering_rate_deg_s;
  const int n = static_cast<int>(std::floor(frames + 0.5 + 1e-9));
  return std::max(1, n);
}

BlurSharpPair AverageFrames(std::span<const GrayImage> frames, const PairSpec& spec) {
  Require(static_cast<int>(frames.size()) == spec.frame_count(),
          "expected " + std::to_string(spec.frame_count()) + " frames, got " +
              std::to_string(frames.size()));
  const GrayImage& first = frames.front();
  std::vector<double> acc(first.size(), 0.0);
  for (const GrayImage& f : frames) {
    Require(f.SameShape(first), "frames differ in dimensions");
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += f[i];
  }
  const double inv = 1.0 / static_cast<double>(frames.size());
  for (double& v : acc) v *= inv;
  return {GrayImage(first.width(), first.height(), std::move(acc)),
          frames[spec.center_index() - 1]};
}

namespace {

// Linear map k -> interior of (sharp * k) and its adjoint, evaluated with
// FFTs on a zero-padded grid. Interior pixels never see the padding.
class BlurOperator {
 public:
  BlurOperator(const GrayImage& sharp, int kernel_size)
      : width_(sharp.width()),
        height_(sharp.height()),
        ks_(kernel_size),
        r_(kernel_size / 2),
        grid_w_(fft::NextFastSize(sharp.width())),
        grid_h_(fft::NextFastSize(sharp.height())) {
    GrayImage padded(grid_w_, grid_h_, 0.0);
    for (int y = 0; y < height_; ++y) {
      for (int x = 0; x < width_; ++x) padded.at(x, y) = sharp.at(x, y);
    }
    sharp_spec_ = fft::Forward(padded);
  }

  int interior_w() const { return width_ - 2 * r_; }
  int interior_h() const { return height_ - 2 * r_; }
  std::size_t interior_size() const {
    return static_cast<std::size_t>(interior_w()) * interior_h();
  }

  std::vector<double> Interior(const GrayImage& image) const {
    std::vector<double> out;
    out.reserve(interior_size());
    for (int y = r_; y < height_ - r_; ++y) {
      for (int x = r_; x < width_ - r_; ++x) out.push_back(image.at(x, y));
    }
    return out;
  }

  std::vector<double> Apply(std::span<const double> k) const {
    fft::Spectrum s = fft::TransferFunction(k, ks_, ks_, r_, r_, grid_w_, grid_h_);
    for (std::size_t i = 0; i < s.bins.size(); ++i) s.bins[i] *= sharp_spec_.bins[i];
    return Interior(fft::Inverse(s));
  }

  // grad(i, j) = sum_p res(p) * sharp(p + (r - i, r - j)).
  std::vector<double> Adjoint(std::span<const double> residual) const {
    GrayImage grid(grid_w_, grid_h_, 0.0);
    std::size_t n = 0;
    for (int y = r_; y < height_ - r_; ++y) {
      for (int x = r_; x < width_ - r_; ++x) grid.at(x, y) = residual[n++];
    }
    fft::Spectrum s = fft::Forward(grid);
    for (std::size_t i = 0; i < s.bins.size(); ++i) {
      s.bins[i] = std::conj(s.bins[i]) * sharp_spec_.bins[i];
    }
    const GrayImage corr = fft::Inverse(s);
    std::vector<double> g(static_cast<std::size_t>(ks_) * ks_);
    for (int j = 0; j < ks_; ++j) {
      const int dy = ((r_ - j) % grid_h_ + grid_h_) % grid_h_;
      for (int i = 0; i < ks_; ++i) {
        const int dx = ((r_ - i) % grid_w_ + grid_w_) % grid_w_;
        g[j * ks_ + i] = corr.at(dx, dy);
      }
    }
    return g;
  }

 private:
  int width_;
  int height_;
  int ks_;
  int r_;
  int grid_w_;
  int grid_h_;
  fft::Spectrum sharp_spec_;
};

double Dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double Norm(std::span<const double> a) { return std::sqrt(Dot(a, a)); }

std::vector<double> Subtract(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

// Euclidean projection onto {k >= 0, sum(k) = 1} by sort and threshold.
std::vector<double> ProjectToSimplex(std::span<const double> v) {
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double prefix = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    prefix += u[j];
    const double t = (prefix - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) tau = t;
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - tau, 0.0);
  return out;
}

// Gradient restricted to the face {k_i > 0} and made zero-sum there.
std::vector<double> FaceGradient(std::span<const double> g, std::span<const double> k) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (k[i] > 0.0) {
      sum += g[i];
      ++count;
    }
  }
  std::vector<double> gp(g.size(), 0.0);
  if (count == 0) return gp;
  const double mean = sum / static_cast<double>(count);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (k[i] > 0.0) gp[i] = g[i] - mean;
  }
  return gp;
}

std::vector<char> ZeroPattern(std::span<const double> k) {
  std::vector<char> z(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) z[i] = k[i] <= 0.0;
  return z;
}

void RecordFeasibility(std::span<const double> k, EstimationTrace& trace) {
  double sum = 0.0;
  for (double v : k) {
    sum += v;
    trace.min_weight = std::min(trace.min_weight, v);
  }
  trace.max_sum_error = std::max(trace.max_sum_error, std::abs(sum - 1.0));
}

double GradientEnergy(const GrayImage& image) {
  double e = 0.0;
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      if (x + 1 < image.width()) {
        const double d = image.at(x + 1, y) - image.at(x, y);
        e += d * d;
      }
      if (y + 1 < image.height()) {
        const double d = image.at(x, y + 1) - image.at(x, y);
        e += d * d;
      }
    }
  }
  return e;
}

}  // namespace

Kernel EstimateKernel(const GrayImage& blurred, const GrayImage& sharp,
                      const EstimationConfig& config, EstimationTrace* trace) {
  Require(blurred.SameShape(sharp), "blurred and sharp images differ in size");
  Require(config.kernel_size >= 1 && config.kernel_size % 2 == 1,
          "kernel_size must be odd and positive");
  Require(config.max_iters >= 1, "max_iters must be >= 1");
  Require(config.tol > 0.0, "tol must be positive");
  Require(config.kernel_size < std::min(sharp.width(), sharp.height()),
          "kernel_size must be smaller than the image");
  if (GradientEnergy(sharp) <= 1e-12 * static_cast<double>(sharp.size())) {
    Fail(ErrorCode::kIllPosed,
         "sharp image has no gradient energy; the kernel is not identifiable");
  }

  const int ks = config.kernel_size;
  const std::size_t n = static_cast<std::size_t>(ks) * ks;
  const BlurOperator op(sharp, ks);
  const std::vector<double> target = op.Interior(blurred);

  std::vector<double> k(n, 0.0);
  if (config.init == KernelInit::kUniform) {
    std::fill(k.begin(), k.end(), 1.0 / static_cast<double>(n));
  } else {
    k[n / 2] = 1.0;
  }

  std::vector<double> residual = Subtract(op.Apply(k), target);
  double res_norm = Norm(residual);
  EstimationTrace local;
  local.residuals.push_back(res_norm);
  local.min_weight = *std::min_element(k.begin(), k.end());

  // Alternates two phases until the budget or the tolerance is hit.
  //  - Projection steps: d = P(k - a g) - k with a the Cauchy step of the
  //    face gradient, then an exact line search on [0, 1]. These change the
  //    zero pattern many coordinates at a time. Repeated until the pattern
  //    settles.
  //  - Conjugate gradients (Polak-Ribiere) on the current face, stopped at
  //    the first step that would leave the simplex, which is truncated to
  //    land exactly on the boundary.
  // Every accepted step lowers the residual.
  int iter = 0;
  auto accept = [&](std::vector<double>& direction, const std::vector<double>& ad,
                    double t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double next = k[i] + t * direction[i];
      // Coordinates driven to the boundary land exactly on zero.
      k[i] = next <= 1e-12 * k[i] ? 0.0 : next;
    }
    for (std::size_t i = 0; i < residual.size(); ++i) residual[i] += t * ad[i];
    res_norm = Norm(residual);
    ++iter;
    local.residuals.push_back(res_norm);
    RecordFeasibility(k, local);
  };

  bool converged = false;
  while (iter < config.max_iters && !converged) {
    // Projection phase.
    std::vector<char> pattern = ZeroPattern(k);
    for (int pass = 0; iter < config.max_iters; ++pass) {
      const std::vector<double> grad = op.Adjoint(residual);
      const std::vector<double> gp = FaceGradient(grad, k);
      const std::vector<double> agp = op.Apply(gp);
      const double gp2 = Dot(gp, gp);
      const double cauchy = Dot(agp, agp) > 0.0 ? gp2 / Dot(agp, agp) : 1.0;
      // Projected search along the arc P(k - a g): lengthen a while the
      // line-searched residual keeps falling.
      std::vector<double> direction, ad;
      double t = 0.0;
      double best = std::numeric_limits<double>::infinity();
      for (double a = cauchy; ; a *= 4.0) {
        std::vector<double> trial(n);
        for (std::size_t i = 0; i < n; ++i) trial[i] = k[i] - a * grad[i];
        std::vector<double> d = Subtract(ProjectToSimplex(trial), k);
        std::vector<double> ad_try = op.Apply(d);
        const double curvature = Dot(ad_try, ad_try);
        const double slope = Dot(residual, ad_try);
        if (curvature <= 0.0 || slope >= 0.0) break;
        const double t_try = std::min(1.0, -slope / curvature);
        // Model value of ||r + t A d||^2 - ||r||^2.
        const double gain = t_try * (2.0 * slope + t_try * curvature);
        if (gain >= best) break;
        best = gain;
        direction = std::move(d);
        ad = std::move(ad_try);
        t = t_try;
        if (t_try < 1.0) break;
      }
      if (direction.empty()) {
        converged = true;
        break;
      }
      const double prev = res_norm;
      accept(direction, ad, t);
      if (prev <= 0.0 || (prev - res_norm) / prev < config.tol) {
        converged = true;
        break;
      }
      std::vector<char> next = ZeroPattern(k);
      const bool settled = next == pattern;
      pattern = std::move(next);
      if (settled || pass >= 4) break;
    }
    if (converged) break;

    // Conjugate-gradient phase on the face.
    ++local.restarts;
    std::vector<double> direction, prev_gp;
    double best_drop = 0.0;
    while (iter < config.max_iters) {
      const std::vector<double> gp = FaceGradient(op.Adjoint(residual), k);
      const double gp2 = Dot(gp, gp);
      if (gp2 <= 1e-30) break;
      if (direction.empty()) {
        direction.resize(n);
        for (std::size_t i = 0; i < n; ++i) direction[i] = -gp[i];
      } else {
        const double beta = std::max(0.0, (gp2 - Dot(gp, prev_gp)) / Dot(prev_gp, prev_gp));
        for (std::size_t i = 0; i < n; ++i) direction[i] = -gp[i] + beta * direction[i];
        if (Dot(direction, gp) >= 0.0) {
          for (std::size_t i = 0; i < n; ++i) direction[i] = -gp[i];
        }
      }
      prev_gp = gp;
      const std::vector<double> ad = op.Apply(direction);
      const double curvature = Dot(ad, ad);
      const double slope = Dot(residual, ad);
      if (curvature <= 0.0 || slope >= 0.0) break;
      double t = -slope / curvature;
      bool hit = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (direction[i] < 0.0 && k[i] + t * direction[i] < 0.0) {
          t = k[i] / -direction[i];
          hit = true;
        }
      }
      const double prev = res_norm;
      accept(direction, ad, t);
      const double drop = prev - res_norm;
      best_drop = std::max(best_drop, drop);
      if (hit || drop <= 1e-3 * best_drop) break;
    }
  }
  // Keep the iterate exactly on the simplex despite clamping round-off.
  const double total = std::accumulate(k.begin(), k.end(), 0.0);
  for (double& v : k) v /= total;

  local.iterations = iter;
  if (trace) *trace = std::move(local);
  return Kernel::FromWeights(ks, ks, std::move(k));
}

std::vector<PairWindow> PlanPairWindows(int frame_total, int frame_count, int stride) {
  Require(frame_count >= 1, "frame count must be >= 1");
  Require(stride >= 1, "stride must be >= 1");
  std::vector<PairWindow> windows;
  for (int first = 0; first + frame_count <= frame_total; first += stride) {
    windows.push_back({first, frame_count});
  }
  return windows;
}

namespace {

// Value of the last run of digits in the file stem, or -1.
long long FrameNumber(const std::filesystem::path& p) {
  const std::string stem = p.stem().string();
  int end = static_cast<int>(stem.size()) - 1;
  while (end >= 0 && !std::isdigit(static_cast<unsigned char>(stem[end]))) --end;
  if (end < 0) return -1;
  int begin = end;
  while (begin > 0 && std::isdigit(static_cast<unsigned char>(stem[begin - 1]))) --begin;
  return std::stoll(stem.substr(begin, end - begin + 1));
}

std::string RateTag(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", rate);
  return buf;
}

}  // namespace

std::vector<std::filesystem::path> ListFrames(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    Fail(ErrorCode::kIo, "not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> frames;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && IsImageFile(entry.path())) {
      frames.push_back(entry.path());
    }
  }
  std::sort(frames.begin(), frames.end(), [](const auto& a, const auto& b) {
    const long long na = FrameNumber(a);
    const long long nb = FrameNumber(b);
    if (na != nb) return na < nb;
    return a.filename() < b.filename();
  });
  return frames;
}

PairDatasetSummary BuildPairDataset(const std::filesystem::path& frame_dir,
                                    std::span<const GimbalMotion> motions,
                                    const std::filesystem::path& out_dir,
                                    const PairDatasetOptions& options) {
  Require(options.stride >= 0, "stride must be >= 0");
  const std::vector<std::filesystem::path> frames = ListFrames(frame_dir);
  std::filesystem::create_directories(out_dir);

  PairDatasetSummary summary;
  summary.manifest = out_dir / "manifest.jsonl";
  std::ofstream manifest(summary.manifest);
  if (!manifest) Fail(ErrorCode::kIo, "cannot create " + summary.manifest.string());

  for (const GimbalMotion& motion : motions) {
    const int count = options.frame_count_override.value_or(FramesForSteering(motion));
    const PairSpec spec(count);
    const int stride = options.stride > 0 ? options.stride : count;
    const auto windows = PlanPairWindows(static_cast<int>(frames.size()), count, stride);
    if (windows.empty()) {
      nlohmann::json warning = {
          {"warning", "insufficient frames"},
          {"steering_rate_deg_s", motion.steering_rate_deg_s},
          {"N", count},
          {"available_frames", frames.size()},
      };
      manifest << warning.dump() << '\n';
      ++summary.motions_skipped;
      continue;
    }
    const std::string tag = "sr" + RateTag(motion.steering_rate_deg_s) + "_N" +
                            std::to_string(count);
    for (std::size_t w = 0; w < windows.size(); ++w) {
      std::vector<GrayImage> stack;
      std::vector<int> indices;
      for (int i = windows[w].first; i < windows[w].first + windows[w].count; ++i) {
        stack.push_back(LoadImage(frames[i]));
        indices.push_back(i);
      }
      const BlurSharpPair pair = AverageFrames(stack, spec);
      char suffix[16];
      std::snprintf(suffix, sizeof(suffix), "_%05zu", w);
      const std::string blur_name = tag + suffix + "_blur.pgm";
      const std::string sharp_name = tag + suffix + "_sharp.pgm";
      SaveImage(pair.blurred, out_dir / blur_name);
      SaveImage(pair.sharp, out_dir / sharp_name);
      nlohmann::json record = {
          {"blur_path", blur_name},
          {"sharp_path", sharp_name},
          {"N", count},
          {"steering_rate_deg_s", motion.steering_rate_deg_s},
          {"source_indices", indices},
      };
      manifest << record.dump() << '\n';
      ++summary.pairs_written;
    }
  }
  return summary;
}

}  // namespace yawdeblur
