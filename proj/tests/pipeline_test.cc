#include <algorithm>
#include <atomic>
#include <fstream>
#include <iterator>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "test_support.h"
#include "yawdeblur/core/convolve.h"
#include "yawdeblur/core/error.h"
#include "yawdeblur/core/image_io.h"
#include "yawdeblur/core/synthetic.h"
#include "yawdeblur/pipeline/bench.h"
#include "yawdeblur/pipeline/lut.h"
#include "yawdeblur/pipeline/runner.h"

using namespace yawdeblur;
using testing::Motion;

namespace {

std::string ReadBytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInvalidArgument;
}

void WriteFrames(const std::filesystem::path& dir, int count, int w, int h) {
  std::filesystem::create_directories(dir);
  auto k = Kernel::MotionLine(7.0, 0.0);
  for (int i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%04d.pgm", i);
    SaveImage(Convolve(SyntheticScene(w, h, 500 + i), k), dir / name);
  }
}

PsfLut SmallLut() {
  PsfLut lut("test-cam");
  lut.Insert(30.0, Kernel::MotionLine(7.0, 0.0), Provenance::kAnalytic);
  lut.Insert(45.0, Kernel::MotionLine(11.0, 0.0), Provenance::kBlurSharpPair);
  return lut;
}

}  // namespace

TEST_CASE("lut insert, lookup and quantization") {
  PsfLut lut = SmallLut();
  CHECK(lut.size() == 2);
  CHECK(lut.Contains(30.0));
  CHECK(lut.Contains(30.04));  // same 0.1 bucket
  CHECK_FALSE(lut.Contains(30.1));
  CHECK(lut.Lookup(45.0).provenance == Provenance::kBlurSharpPair);
  CHECK(CodeOf([&] { lut.Lookup(25.0); }) == ErrorCode::kNotFound);
  CHECK(CodeOf([&] { lut.Lookup(-1.0); }) == ErrorCode::kInvalidArgument);
  CHECK(lut.Rates() == std::vector<double>{30.0, 45.0});
  CHECK(ProvenanceName(Provenance::kBlurSharpPair) == "blur-sharp-pair");
  CHECK(ParseProvenance("analytic") == Provenance::kAnalytic);
  CHECK_THROWS_AS(ParseProvenance("guess"), Error);
}

TEST_CASE("lut round trip through disk") {
  testing::TempDir dir;
  auto cam = testing::GimbalCamera();
  const GimbalMotion motions[] = {Motion(12.5), Motion(60.0)};
  PsfLut lut = BuildLutAnalytic(cam, motions, "ir-gimbal");
  lut.Insert(7.0, Kernel::Gaussian(5, 5, 1.0), Provenance::kBlurSharpPair);
  lut.Save(dir.path());

  auto index = nlohmann::json::parse(ReadBytes(dir / "index.json"));
  CHECK(index["camera_id"] == "ir-gimbal");
  REQUIRE(index["entries"].size() == 3);
  for (const auto& e : index["entries"]) {
    CHECK(e.contains("steering_rate_deg_s"));
    CHECK(std::filesystem::exists(dir / e["kernel_file"].get<std::string>()));
  }

  PsfLut back = PsfLut::Load(dir.path());
  CHECK(back.camera_id() == "ir-gimbal");
  REQUIRE(back.Rates() == lut.Rates());
  for (double r : lut.Rates()) {
    CHECK(back.Lookup(r).provenance == lut.Lookup(r).provenance);
    const auto& a = back.Lookup(r).kernel.weights();
    const auto& b = lut.Lookup(r).kernel.weights();
    REQUIRE(a.size() == b.size());
    double err = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) err = std::max(err, std::abs(a[i] - b[i]));
    CHECK(err <= 1e-9);
  }
}

TEST_CASE("lut load errors") {
  testing::TempDir dir;
  CHECK(CodeOf([&] { PsfLut::Load(dir.path()); }) == ErrorCode::kIo);
  std::ofstream(dir / "index.json") << "{\"entries\": 5";
  CHECK(CodeOf([&] { PsfLut::Load(dir.path()); }) == ErrorCode::kParse);
}

TEST_CASE("analytic lut over 10 to 60 deg/s") {
  std::vector<GimbalMotion> motions;
  for (int r = 10; r <= 60; r += 10) motions.push_back(Motion(r));
  PsfLut lut = BuildLutAnalytic(testing::GimbalCamera(), motions, "cam");
  CHECK(lut.size() == 6);
  int prev = 0;
  for (double r : lut.Rates()) {
    const int width = lut.Lookup(r).kernel.SupportWidth();
    CHECK(width > prev);
    prev = width;
  }
  CHECK(CodeOf([&] { lut.Lookup(25.0); }) == ErrorCode::kNotFound);

  const GimbalMotion still[] = {Motion(0.0)};
  CHECK(BuildLutAnalytic(testing::GimbalCamera(), still, "cam").Lookup(0.0).kernel ==
        Kernel::Delta());
}

TEST_CASE("lut from blur-sharp pairs") {
  testing::TempDir dir;
  // A slow pan: each frame is the scene shifted one more pixel, so N
  // averaged frames are the sharp center frame under an N-pixel box.
  const auto frames = dir / "frames";
  std::filesystem::create_directories(frames);
  auto scene = SyntheticScene(140, 100, 9);
  auto noise = testing::RandomImage(140, 100, 10, -0.04, 0.04);
  for (std::size_t i = 0; i < scene.size(); ++i) scene[i] += noise[i];
  for (int i = 0; i < 16; ++i)
    SaveImage(CircularShift(scene, i, 0).Crop(20, 0, 100, 100),
              frames / ("f" + std::to_string(i) + ".png"));

  const GimbalMotion motions[] = {Motion(40.0), Motion(200.0)};  // N = 6, 30
  EstimationConfig cfg;
  cfg.kernel_size = 15;
  std::vector<std::string> log;
  PsfLut lut = BuildLutFromPairs(frames, motions, cfg, "cam", &log);
  CHECK(lut.size() == 1);
  REQUIRE(lut.Contains(40.0));
  CHECK_FALSE(lut.Contains(200.0));
  CHECK(lut.Lookup(40.0).provenance == Provenance::kBlurSharpPair);
  bool noted = false;
  for (const auto& line : log) noted |= line.find("omitted") != std::string::npos;
  CHECK(noted);

  // Frames 5..10 average; sharp is frame 8 (N/2 + 1 = 4th of 6), so the
  // box covers offsets -3..+2 around the anchor.
  const Kernel& k = lut.Lookup(40.0).kernel;
  std::vector<double> box(15 * 15, 0.0);
  for (int dx = -3; dx <= 2; ++dx) box[7 * 15 + 7 + dx] = 1.0;
  CHECK(KernelNcc(k, Kernel::FromWeights(15, 15, box)) >= 0.95);
}

TEST_CASE("parallel for covers every index and propagates errors") {
  std::vector<std::atomic<int>> hits(100);
  ParallelFor(100, 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(ParallelFor(10, 3,
                              [](std::size_t i) {
                                if (i == 5) Fail(ErrorCode::kIo, "boom");
                              }),
                  Error);
  CHECK_THROWS_AS(ParallelFor(1, 0, [](std::size_t) {}), Error);
  CHECK(ParallelFor(0, 4, [](std::size_t) { FAIL("no work expected"); }) >= 0.0);
}

TEST_CASE("pipeline output is independent of the worker count") {
  testing::TempDir dir;
  WriteFrames(dir / "in", 32, 72, 56);
  PsfLut lut = SmallLut();
  std::vector<std::string> reference;
  for (int workers : {1, 4, 8}) {
    PipelineConfig cfg;
    cfg.workers = workers;
    cfg.input_dir = dir / "in";
    cfg.output_dir = dir / ("out" + std::to_string(workers));
    cfg.steering_rate_deg_s = 30.0;
    auto report = RunPipeline(cfg, lut);
    CHECK(report.frames.size() == 32);
    CHECK(report.workers == workers);
    std::vector<std::string> bytes;
    for (int i = 0; i < 32; ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "frame_%04d.pgm", i);
      bytes.push_back(ReadBytes(cfg.output_dir / name));
      CHECK_FALSE(bytes.back().empty());
    }
    if (reference.empty()) {
      reference = bytes;
    } else {
      CHECK(bytes == reference);
    }
  }
}

TEST_CASE("pipeline report and failure handling") {
  testing::TempDir dir;
  WriteFrames(dir / "in", 4, 64, 48);
  std::ofstream(dir / "in" / "frame_0002.pgm", std::ios::trunc) << "P5\n64 48\n255\nxx";
  PipelineConfig cfg;
  cfg.input_dir = dir / "in";
  cfg.output_dir = dir / "out";
  cfg.steering_rate_deg_s = 30.0;
  cfg.deblur.method = Method::kRl;
  cfg.report_path = dir / "report.json";
  auto report = RunPipeline(cfg, SmallLut());
  CHECK(report.frames.size() == 3);
  REQUIRE(report.failures.size() == 1);
  CHECK(report.failures[0].frame == "frame_0002.pgm");
  CHECK(report.method == "rl");
  CHECK(report.fps == doctest::Approx(3.0 / report.wall_seconds));
  CHECK_FALSE(std::filesystem::exists(dir / "out" / "frame_0002.pgm"));

  auto j = nlohmann::json::parse(ReadBytes(dir / "report.json"));
  CHECK(j["method"] == "rl");
  CHECK(j["workers"] == 1);
  REQUIRE(j["frames"].size() == 3);
  CHECK(j["frames"][0]["frame"] == "frame_0000.pgm");
  CHECK(j["frames"][0]["method"] == "rl");
  CHECK(j["frames"][0]["ms"].get<double>() > 0.0);
  CHECK(j["failures"].size() == 1);
  CHECK(j.contains("machine_note"));
}

TEST_CASE("missing LUT entry aborts before any frame") {
  testing::TempDir dir;
  WriteFrames(dir / "in", 3, 64, 48);
  PipelineConfig cfg;
  cfg.input_dir = dir / "in";
  cfg.output_dir = dir / "out";
  cfg.steering_rate_deg_s = 25.0;
  CHECK(CodeOf([&] { RunPipeline(cfg, SmallLut()); }) == ErrorCode::kNotFound);
  CHECK_FALSE(std::filesystem::exists(dir / "out"));
}

TEST_CASE("per-frame rate sidecar") {
  testing::TempDir dir;
  WriteFrames(dir / "in", 3, 64, 48);
  std::ofstream(dir / "rates.json") << R"({"1": 45.0})";
  PipelineConfig cfg;
  cfg.input_dir = dir / "in";
  cfg.output_dir = dir / "out";
  cfg.steering_rate_deg_s = 30.0;
  cfg.rate_sidecar = dir / "rates.json";
  auto lut = SmallLut();
  RunPipeline(cfg, lut);
  auto frame1 = LoadImage(dir / "in" / "frame_0001.pgm");
  auto expected = Deblur(frame1, lut.Lookup(45.0).kernel, cfg.deblur).image;
  for (double& v : expected.pixels()) v = std::clamp(v, 0.0, 1.0);  // save clips
  auto got = LoadImage(dir / "out" / "frame_0001.pgm");
  CHECK(testing::MaxAbsDiff(got, expected) <= 0.5 / 65535 + 1e-12);

  std::ofstream(dir / "rates.json", std::ios::trunc) << R"({"0": 31.0})";
  cfg.output_dir = dir / "out2";
  CHECK(CodeOf([&] { RunPipeline(cfg, lut); }) == ErrorCode::kNotFound);
}

TEST_CASE("empty input directory") {
  testing::TempDir dir;
  std::filesystem::create_directories(dir / "in");
  PipelineConfig cfg;
  cfg.input_dir = dir / "in";
  cfg.output_dir = dir / "out";
  cfg.steering_rate_deg_s = 30.0;
  auto report = RunPipeline(cfg, SmallLut());
  CHECK(report.frames.empty());
  CHECK(report.failures.empty());
  CHECK(report.fps == 0.0);
}

TEST_CASE("bench table schema") {
  BenchConfig cfg;
  CHECK(cfg.batch_frames == 312);
  CHECK(cfg.streaming_frames == 30);
  for (Method m : {Method::kWiener, Method::kRl, Method::kHyperLaplacian}) {
    DeblurSettings s;
    s.method = m;
    cfg.methods.push_back(s);
  }
  cfg.kernel = Kernel::MotionLine(9.0, 0.0);
  cfg.width = 96;
  cfg.height = 80;
  cfg.streaming_frames = 3;
  cfg.batch_frames = 0;
  auto result = RunBench(cfg);
  REQUIRE(result.rows.size() == 3);
  CHECK(result.rows[0].method == "wiener");
  CHECK(result.rows[2].method == "hyperlap");
  for (const auto& r : result.rows) {
    CHECK(r.protocol == "streaming");
    CHECK(r.frames == 3);
    CHECK(r.ms_per_frame > 0.0);
  }
  const std::string csv = result.ToCsv();
  CHECK(csv.rfind("method,protocol,frames,workers,total_s,ms_per_frame,fps\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  cfg.methods.clear();
  CHECK_THROWS_AS(RunBench(cfg), Error);
}
