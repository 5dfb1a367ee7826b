#include "yawdeblur/core/kernel_io.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "yawdeblur/core/error.h"

namespace yawdeblur {

std::string FormatKernel(const Kernel& kernel) {
  std::string out = "PSF " + std::to_string(kernel.size_x()) + " " +
                    std::to_string(kernel.size_y()) + "\n";
  char buf[32];
  for (int y = 0; y < kernel.size_y(); ++y) {
    for (int x = 0; x < kernel.size_x(); ++x) {
      std::snprintf(buf, sizeof(buf), "%.17g", kernel.at(x, y));
      if (x > 0) out += ' ';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

Kernel ParseKernel(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) Fail(ErrorCode::kParse, "kernel file is empty");
  std::istringstream header(line);
  std::string magic;
  int sx = 0, sy = 0;
  if (!(header >> magic >> sx >> sy) || magic != "PSF") {
    Fail(ErrorCode::kParse, "kernel header must be 'PSF <size_x> <size_y>'");
  }
  if (sx <= 0 || sy <= 0 || sx % 2 == 0 || sy % 2 == 0) {
    Fail(ErrorCode::kParse, "kernel dimensions must be odd and positive");
  }
  std::vector<double> weights;
  weights.reserve(static_cast<std::size_t>(sx) * sy);
  for (int y = 0; y < sy; ++y) {
    if (!std::getline(in, line)) {
      Fail(ErrorCode::kTruncated, "kernel file ends after " + std::to_string(y) +
                                      " of " + std::to_string(sy) + " rows");
    }
    std::istringstream row(line);
    double v = 0.0;
    int n = 0;
    while (row >> v) {
      weights.push_back(v);
      ++n;
    }
    if (!row.eof() || n != sx) {
      Fail(ErrorCode::kParse, "kernel row " + std::to_string(y) + " has " +
                                  std::to_string(n) + " values, expected " +
                                  std::to_string(sx));
    }
  }
  try {
    return Kernel::FromWeights(sx, sy, std::move(weights));
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
}

Kernel LoadKernel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open kernel file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseKernel(buf.str());
}

void SaveKernel(const Kernel& kernel, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot create kernel file " + path.string());
  out << FormatKernel(kernel);
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace yawdeblur
