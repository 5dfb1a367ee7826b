// Command-line front end. Exit codes: 0 ok, 2 bad arguments, 3 data error,
// 4 steering rate missing from the LUT.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "yawdeblur/core/error.h"
#include "yawdeblur/core/image_io.h"
#include "yawdeblur/core/kernel_io.h"
#include "yawdeblur/deconv/deconv.h"
#include "yawdeblur/metrics.h"
#include "yawdeblur/pipeline/bench.h"
#include "yawdeblur/pipeline/lut.h"
#include "yawdeblur/pipeline/runner.h"
#include "yawdeblur/psf_analytic.h"
#include "yawdeblur/psf_estimate.h"

namespace fs = std::filesystem;
using namespace yawdeblur;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitLutMiss = 4;

bool g_verbose = false;

void Log(const std::string& line) {
  if (g_verbose) std::cerr << line << '\n';
}

struct CameraArgs {
  double fov_deg = 8.0;
  std::optional<double> focal_px;
  int width = 558;
  int height = 481;

  void Add(CLI::App* app) {
    app->add_option("--fov", fov_deg, "Diagonal field of view, degrees")->capture_default_str();
    app->add_option("--focal", focal_px, "Focal length in pixels (overrides --fov)");
    app->add_option("--width", width, "Frame width")->capture_default_str();
    app->add_option("--height", height, "Frame height")->capture_default_str();
  }
  CameraIntrinsics Build() const {
    return focal_px ? CameraIntrinsics(*focal_px, width, height)
                    : CameraIntrinsics::FromFov(fov_deg, width, height);
  }
};

struct MotionArgs {
  double exposure_s = 0.005;
  double frame_rate = 30.0;

  void Add(CLI::App* app) {
    app->add_option("--exposure", exposure_s, "Exposure time, seconds")->capture_default_str();
    app->add_option("--frame-rate", frame_rate, "Frame rate, fps")->capture_default_str();
  }
  GimbalMotion At(double rate) const {
    GimbalMotion m{rate, exposure_s, frame_rate};
    m.Validate();
    return m;
  }
  std::vector<GimbalMotion> At(const std::vector<double>& rates) const {
    std::vector<GimbalMotion> out;
    for (double r : rates) out.push_back(At(r));
    return out;
  }
};

struct MethodArgs {
  std::string method = "wiener";
  double nsr = WienerParams{}.nsr;
  int rl_iters = RlParams{}.iterations;
  double lambda = HyperLapParams{}.lambda;
  double p = HyperLapParams{}.p;
  bool no_edgetaper = false;
  bool periodic = false;

  void Add(CLI::App* app) {
    app->add_option("--method", method, "wiener | rl | hyperlap")->capture_default_str();
    app->add_option("--nsr", nsr, "Wiener noise-to-signal ratio")->capture_default_str();
    app->add_option("--rl-iters", rl_iters, "Richardson-Lucy iterations")->capture_default_str();
    app->add_option("--lambda", lambda, "Hyper-Laplacian data weight")->capture_default_str();
    app->add_option("--p", p, "Hyper-Laplacian exponent")->capture_default_str();
    app->add_flag("--no-edgetaper", no_edgetaper, "Skip edge tapering");
    app->add_flag("--periodic", periodic, "Treat frames as periodic instead of padding");
  }
  DeblurSettings Build() const {
    DeblurSettings s;
    s.method = ParseMethod(method);
    const SolveBoundary boundary =
        periodic ? SolveBoundary::kPeriodic : SolveBoundary::kSymmetricPad;
    s.wiener.nsr = nsr;
    s.wiener.boundary = boundary;
    s.rl.iterations = rl_iters;
    s.rl.boundary = boundary;
    s.hyperlap.lambda = lambda;
    s.hyperlap.p = p;
    s.hyperlap.boundary = boundary;
    s.hyperlap.Validate();
    s.edge_taper = !no_edgetaper;
    return s;
  }
};

BitDepth ParseDepth(int bits) {
  if (bits == 8) return BitDepth::k8;
  if (bits == 16) return BitDepth::k16;
  Fail(ErrorCode::kInvalidArgument, "--depth must be 8 or 16");
}

void WriteText(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path);
  out << text;
}

// Flat "key = value" lines; '#' starts a comment. Keys are long option
// names without the leading dashes.
std::vector<std::pair<std::string, std::string>> ReadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open config " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int n = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++n;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      Fail(ErrorCode::kInvalidArgument,
           "config " + path + " line " + std::to_string(n) + ": expected key = value");
    }
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

// Fills options the command line left unset. A key is applied to the
// active subcommand first, then to the global options; keys neither knows
// are an error, keys meant for other subcommands are skipped.
void ApplyConfig(CLI::App& app, CLI::App* sub, const std::string& path) {
  for (const auto& [key, value] : ReadConfig(path)) {
    CLI::Option* opt = sub ? sub->get_option_no_throw("--" + key) : nullptr;
    if (!opt) opt = app.get_option_no_throw("--" + key);
    if (!opt) {
      bool known = false;
      for (CLI::App* other : app.get_subcommands([](CLI::App*) { return true; }))
        known |= other->get_option_no_throw("--" + key) != nullptr;
      if (!known) Fail(ErrorCode::kInvalidArgument, "unknown config key '" + key + "'");
      Log("config: '" + key + "' does not apply here, skipped");
      continue;
    }
    if (opt->count() > 0) continue;  // command line wins
    opt->add_result(value);
    opt->run_callback();
    Log("config: " + key + " = " + value);
  }
}

int RunEvaluate(const std::string& manifest_path, const std::vector<std::string>& score_files,
                const std::string& output) {
  // Manifest: JSON lines {"pair_id", "method", "deblurred", "reference"};
  // relative paths resolve against the manifest's directory.
  std::ifstream in(manifest_path);
  if (!in) Fail(ErrorCode::kIo, "cannot open manifest " + manifest_path);
  const fs::path base = fs::path(manifest_path).parent_path();
  struct Row {
    std::string pair_id, method;
    double psnr, ssim;
  };
  std::vector<Row> rows;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      const GrayImage x = LoadImage(base / j.at("deblurred").get<std::string>());
      const GrayImage ref = LoadImage(base / j.at("reference").get<std::string>());
      const std::string id = j.contains("pair_id") ? (j["pair_id"].is_string()
                                                          ? j["pair_id"].get<std::string>()
                                                          : j["pair_id"].dump())
                                                   : std::to_string(n);
      rows.push_back({id, j.value("method", std::string("unknown")), Psnr(x, ref), Ssim(x, ref)});
    } catch (const nlohmann::json::exception& e) {
      Fail(ErrorCode::kParse, "manifest line " + std::to_string(n) + ": " + e.what());
    }
  }

  // External score files are CSV with pair_id and method columns; their
  // remaining columns are appended to matching rows.
  std::vector<std::string> extra_cols;
  std::map<std::pair<std::string, std::string>, std::map<std::string, std::string>> extra;
  for (const std::string& file : score_files) {
    std::ifstream s(file);
    if (!s) Fail(ErrorCode::kIo, "cannot open score file " + file);
    auto split = [](const std::string& l) {
      std::vector<std::string> cells;
      std::stringstream ss(l);
      std::string c;
      while (std::getline(ss, c, ',')) cells.push_back(c);
      return cells;
    };
    std::string header_line;
    if (!std::getline(s, header_line)) Fail(ErrorCode::kParse, "empty score file " + file);
    if (!header_line.empty() && header_line.back() == '\r') header_line.pop_back();
    const auto header = split(header_line);
    const auto id_col = static_cast<std::size_t>(std::find(header.begin(), header.end(), "pair_id") - header.begin());
    const auto m_col = static_cast<std::size_t>(std::find(header.begin(), header.end(), "method") - header.begin());
    if (id_col == header.size() || m_col == header.size()) {
      Fail(ErrorCode::kParse, "score file " + file + " needs pair_id and method columns");
    }
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c != id_col && c != m_col &&
          std::find(extra_cols.begin(), extra_cols.end(), header[c]) == extra_cols.end())
        extra_cols.push_back(header[c]);
    }
    while (std::getline(s, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto cells = split(line);
      if (cells.size() != header.size()) Fail(ErrorCode::kParse, "ragged row in " + file);
      auto& dst = extra[{cells[id_col], cells[m_col]}];
      for (std::size_t c = 0; c < header.size(); ++c) dst[header[c]] = cells[c];
    }
  }

  std::string csv = "pair_id,method,psnr_db,ssim";
  for (const auto& c : extra_cols) csv += "," + c;
  csv += '\n';
  char buf[64];
  for (const Row& r : rows) {
    std::snprintf(buf, sizeof(buf), ",%.4f,%.6f", r.psnr, r.ssim);
    csv += r.pair_id + "," + r.method + buf;
    const auto it = extra.find({r.pair_id, r.method});
    for (const auto& c : extra_cols) {
      csv += ",";
      if (it != extra.end() && it->second.contains(c)) csv += it->second.at(c);
    }
    csv += '\n';
  }
  WriteText(csv, output);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PSF-aware motion deblurring for yaw-panning gimbal cameras", "yawdeblur"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::string config_path;
  int workers = 1;
  app.add_option("--config", config_path, "Flat key = value file; command-line flags win");
  app.add_option("--workers", workers, "Worker threads for run and bench")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("-v,--verbose", g_verbose, "Diagnostics on stderr");

  // psf-analytic
  CameraArgs pa_cam;
  MotionArgs pa_motion;
  double pa_rate = 0.0;
  std::optional<double> pa_ax, pa_ay;
  int pa_oversample = 4;
  bool pa_grid = false;
  std::string pa_out;
  auto* pa = app.add_subcommand("psf-analytic", "Synthesize a PSF from intrinsics and steering rate");
  pa_cam.Add(pa);
  pa_motion.Add(pa);
  pa->add_option("--rate", pa_rate, "Steering rate, deg/s")->required();
  pa->add_option("--anchor-x", pa_ax, "Anchor column (default: principal point)");
  pa->add_option("--anchor-y", pa_ay, "Anchor row (default: principal point)");
  pa->add_option("--oversample", pa_oversample, "Yaw samples per pixel step")->capture_default_str();
  pa->add_flag("--grid", pa_grid, "Average the center and corner PSFs");
  pa->add_option("-o,--output", pa_out, "Kernel file (default stdout)");

  // psf-estimate
  std::string pe_blurred, pe_sharp, pe_out, pe_init = "uniform";
  EstimationConfig pe_cfg;
  auto* pe = app.add_subcommand("psf-estimate", "Estimate a PSF from a blur-sharp pair");
  pe->add_option("--blurred", pe_blurred, "Blurred image")->required();
  pe->add_option("--sharp", pe_sharp, "Sharp image")->required();
  pe->add_option("--kernel-size", pe_cfg.kernel_size, "Odd kernel size")->capture_default_str();
  pe->add_option("--max-iters", pe_cfg.max_iters)->capture_default_str();
  pe->add_option("--tol", pe_cfg.tol)->capture_default_str();
  pe->add_option("--init", pe_init, "uniform | delta")->capture_default_str();
  pe->add_option("-o,--output", pe_out, "Kernel file (default stdout)");

  // make-pairs
  std::string mp_frames, mp_out;
  std::vector<double> mp_rates;
  MotionArgs mp_motion;
  PairDatasetOptions mp_opts;
  auto* mp = app.add_subcommand("make-pairs", "Average slow-pan frames into blur-sharp pairs");
  mp->add_option("--frames", mp_frames, "Directory of 1 deg/s frames")->required();
  mp->add_option("--rates", mp_rates, "Steering rates to emulate, deg/s")->required()->delimiter(',');
  mp_motion.Add(mp);
  mp->add_option("--stride", mp_opts.stride, "Window advance (0 = N)")->capture_default_str();
  mp->add_option("--frame-count", mp_opts.frame_count_override, "Fixed N for every rate");
  mp->add_option("-o,--output", mp_out, "Output directory")->required();

  // build-lut
  std::string bl_mode = "analytic", bl_frames, bl_out, bl_camera_id = "camera";
  std::vector<double> bl_rates;
  CameraArgs bl_cam;
  MotionArgs bl_motion;
  EstimationConfig bl_est;
  int bl_oversample = 4;
  auto* bl = app.add_subcommand("build-lut", "Precompute a steering-rate PSF lookup table");
  bl->add_option("--mode", bl_mode, "analytic | pairs")->capture_default_str();
  bl->add_option("--rates", bl_rates, "Steering rates, deg/s")->required()->delimiter(',');
  bl_cam.Add(bl);
  bl_motion.Add(bl);
  bl->add_option("--frames", bl_frames, "Directory of 1 deg/s frames (pairs mode)");
  bl->add_option("--kernel-size", bl_est.kernel_size, "Estimated kernel size (pairs mode)")
      ->capture_default_str();
  bl->add_option("--oversample", bl_oversample)->capture_default_str();
  bl->add_option("--camera-id", bl_camera_id)->capture_default_str();
  bl->add_option("-o,--output", bl_out, "LUT directory")->required();

  // deblur
  std::string db_in, db_out, db_psf, db_lut, db_timing;
  std::optional<double> db_rate;
  int db_depth = 16;
  MethodArgs db_method;
  auto* db = app.add_subcommand("deblur", "Deblur one image with a known PSF");
  db->add_option("input", db_in, "Blurred image")->required();
  db->add_option("-o,--output", db_out, "Deblurred image (.pgm or .png)")->required();
  db->add_option("--psf", db_psf, "Kernel file");
  db->add_option("--lut", db_lut, "LUT directory (with --rate)");
  db->add_option("--rate", db_rate, "Steering rate for the LUT lookup, deg/s");
  db_method.Add(db);
  db->add_option("--depth", db_depth, "Output bit depth, 8 or 16")->capture_default_str();
  db->add_option("--timing-report", db_timing, "JSON {frame, method, ms}");

  // run
  std::string run_in, run_out, run_lut, run_report, run_sidecar;
  double run_rate = 0.0;
  int run_depth = 16;
  MethodArgs run_method;
  auto* run = app.add_subcommand("run", "Deblur a frame directory through a LUT");
  run->add_option("--input", run_in, "Frame directory")->required();
  run->add_option("--output", run_out, "Output directory")->required();
  run->add_option("--lut", run_lut, "LUT directory")->required();
  run->add_option("--rate", run_rate, "Steering rate, deg/s")->required();
  run->add_option("--rate-sidecar", run_sidecar, "JSON {frame index: rate}");
  run_method.Add(run);
  run->add_option("--depth", run_depth, "Output bit depth, 8 or 16")->capture_default_str();
  run->add_option("--timing-report", run_report, "Timing report JSON");

  // bench
  std::vector<std::string> bn_methods = {"wiener", "rl", "hyperlap"};
  std::string bn_psf, bn_out;
  double bn_rate = 60.0;
  CameraArgs bn_cam;
  MotionArgs bn_motion;
  MethodArgs bn_params;
  BenchConfig bn_cfg;
  auto* bn = app.add_subcommand("bench", "Streaming and batch timing on synthetic frames");
  bn->add_option("--methods", bn_methods, "Methods to time")->delimiter(',')->capture_default_str();
  bn->add_option("--psf", bn_psf, "Kernel file (default: analytic PSF at --rate)");
  bn->add_option("--rate", bn_rate, "Steering rate for the analytic PSF")->capture_default_str();
  bn_cam.Add(bn);
  bn_motion.Add(bn);
  bn->add_option("--nsr", bn_params.nsr)->capture_default_str();
  bn->add_option("--rl-iters", bn_params.rl_iters)->capture_default_str();
  bn->add_option("--lambda", bn_params.lambda)->capture_default_str();
  bn->add_option("--p", bn_params.p)->capture_default_str();
  bn->add_option("--streaming-frames", bn_cfg.streaming_frames)->capture_default_str();
  bn->add_option("--batch-frames", bn_cfg.batch_frames)->capture_default_str();
  bn->add_option("-o,--output", bn_out, "CSV file (default stdout)");

  // evaluate
  std::string ev_manifest, ev_out;
  std::vector<std::string> ev_scores;
  auto* ev = app.add_subcommand("evaluate", "PSNR and SSIM over (deblurred, reference) pairs");
  ev->add_option("--manifest", ev_manifest, "JSON lines {pair_id, method, deblurred, reference}")
      ->required();
  ev->add_option("--scores", ev_scores, "Extra CSV score files to merge");
  ev->add_option("-o,--output", ev_out, "CSV file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    CLI::App* active = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front();
    if (!config_path.empty()) {
      try {
        ApplyConfig(app, active, config_path);
      } catch (const CLI::Error& e) {
        Fail(ErrorCode::kInvalidArgument, std::string("config: ") + e.what());
      }
    }
    Require(workers >= 1, "--workers must be >= 1");

    if (active == pa) {
      PsfSynthesisConfig cfg;
      cfg.oversample = pa_oversample;
      const CameraIntrinsics cam = pa_cam.Build();
      Kernel k;
      if (pa_grid) {
        k = PsfGrid(cam, pa_motion.At(pa_rate), CenterAndCorners(cam), pa_oversample);
      } else {
        if (pa_ax || pa_ay) cfg.anchor = PixelPoint{pa_ax.value_or(cam.cx()), pa_ay.value_or(cam.cy())};
        k = SynthesizePsf(cam, pa_motion.At(pa_rate), cfg);
      }
      Log("kernel " + std::to_string(k.size_x()) + "x" + std::to_string(k.size_y()) +
          ", support " + std::to_string(k.SupportWidth()) + " px");
      WriteText(FormatKernel(k), pa_out);
    } else if (active == pe) {
      if (pe_init == "uniform") {
        pe_cfg.init = KernelInit::kUniform;
      } else if (pe_init == "delta") {
        pe_cfg.init = KernelInit::kDelta;
      } else {
        Fail(ErrorCode::kInvalidArgument, "--init must be uniform or delta");
      }
      EstimationTrace trace;
      const Kernel k = EstimateKernel(LoadImage(pe_blurred), LoadImage(pe_sharp), pe_cfg, &trace);
      Log("iterations " + std::to_string(trace.iterations) + ", residual " +
          std::to_string(trace.residuals.front()) + " -> " + std::to_string(trace.residuals.back()));
      WriteText(FormatKernel(k), pe_out);
    } else if (active == mp) {
      const auto summary =
          BuildPairDataset(mp_frames, mp_motion.At(mp_rates), mp_out, mp_opts);
      std::cout << summary.pairs_written << " pairs written, " << summary.motions_skipped
                << " rates skipped; manifest " << summary.manifest.string() << '\n';
    } else if (active == bl) {
      const auto motions = bl_motion.At(bl_rates);
      PsfLut lut;
      if (bl_mode == "analytic") {
        lut = BuildLutAnalytic(bl_cam.Build(), motions, bl_camera_id, bl_oversample);
      } else if (bl_mode == "pairs") {
        Require(!bl_frames.empty(), "pairs mode needs --frames");
        std::vector<std::string> log;
        lut = BuildLutFromPairs(bl_frames, motions, bl_est, bl_camera_id, &log);
        for (const auto& line : log) std::cerr << line << '\n';
      } else {
        Fail(ErrorCode::kInvalidArgument, "--mode must be analytic or pairs");
      }
      lut.Save(bl_out);
      std::cout << lut.size() << " entries written to " << bl_out << '\n';
    } else if (active == db) {
      Require(db_psf.empty() != db_lut.empty(), "give exactly one of --psf or --lut");
      Kernel k;
      if (!db_psf.empty()) {
        k = LoadKernel(db_psf);
      } else {
        Require(db_rate.has_value(), "--lut needs --rate");
        k = PsfLut::Load(db_lut).Lookup(*db_rate).kernel;
      }
      const DeblurSettings settings = db_method.Build();
      const DeblurResult result = Deblur(LoadImage(db_in), k, settings);
      SaveImage(result.image, db_out, ParseDepth(db_depth));
      if (result.diagnostics.unstable) std::cerr << "warning: spectral zero hit at nsr 0\n";
      if (result.diagnostics.clipped_negatives > 0) {
        std::cerr << "warning: clipped " << result.diagnostics.clipped_negatives
                  << " negative input pixels\n";
      }
      Log(std::string(MethodName(result.method)) + " " + std::to_string(result.ms) + " ms");
      if (!db_timing.empty()) {
        nlohmann::json j = {{"frame", fs::path(db_in).filename().string()},
                            {"method", MethodName(result.method)},
                            {"ms", result.ms}};
        WriteText(j.dump(2) + "\n", db_timing);
      }
    } else if (active == run) {
      PipelineConfig cfg;
      cfg.workers = workers;
      cfg.deblur = run_method.Build();
      cfg.input_dir = run_in;
      cfg.output_dir = run_out;
      cfg.steering_rate_deg_s = run_rate;
      cfg.output_depth = ParseDepth(run_depth);
      if (!run_sidecar.empty()) cfg.rate_sidecar = run_sidecar;
      if (!run_report.empty()) cfg.report_path = run_report;
      const TimingReport report = RunPipeline(cfg, PsfLut::Load(run_lut));
      for (const auto& f : report.failures) std::cerr << "skipped " << f.frame << ": " << f.error << '\n';
      std::printf("%zu frames, %zu failed, %.3f s, %.2f fps (%d workers)\n",
                  report.frames.size(), report.failures.size(), report.wall_seconds,
                  report.fps, report.workers);
    } else if (active == bn) {
      bn_cfg.kernel = bn_psf.empty()
                          ? PsfGrid(bn_cam.Build(), bn_motion.At(bn_rate),
                                    CenterAndCorners(bn_cam.Build()))
                          : LoadKernel(bn_psf);
      bn_cfg.width = bn_cam.width;
      bn_cfg.height = bn_cam.height;
      bn_cfg.workers = workers;
      for (const auto& name : bn_methods) {
        MethodArgs m = bn_params;
        m.method = name;
        bn_cfg.methods.push_back(m.Build());
      }
      const BenchResult result = RunBench(bn_cfg);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
      WriteText(result.ToCsv(), bn_out);
    } else if (active == ev) {
      return RunEvaluate(ev_manifest, ev_scores, ev_out);
    }
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::kInvalidArgument:
        return kExitUsage;
      case ErrorCode::kNotFound:
        return kExitLutMiss;
      default:
        return kExitData;
    }
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
}
