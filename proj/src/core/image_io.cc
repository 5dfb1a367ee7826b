#include "yawdeblur/core/image_io.h"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <csetjmp>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "yawdeblur/core/error.h"

namespace yawdeblur {

namespace {

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

std::vector<std::uint8_t> ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void WriteFile(const std::filesystem::path& path,
               const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

int MaxCode(BitDepth depth) { return depth == BitDepth::k8 ? 255 : 65535; }

unsigned Quantize(double v, int max_code) {
  const double c = std::clamp(v, 0.0, 1.0) * max_code;
  return static_cast<unsigned>(std::lround(c));
}

// Reads one unsigned decimal header token, skipping whitespace and
// '#' comments.
long ReadHeaderNumber(std::span<const std::uint8_t> bytes, std::size_t& pos,
                      const char* field) {
  while (pos < bytes.size()) {
    if (std::isspace(bytes[pos])) {
      ++pos;
    } else if (bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
  if (pos >= bytes.size() || !std::isdigit(bytes[pos])) {
    Fail(ErrorCode::kParse, std::string("PGM header: missing or invalid ") + field);
  }
  long value = 0;
  while (pos < bytes.size() && std::isdigit(bytes[pos])) {
    value = value * 10 + (bytes[pos] - '0');
    if (value > 1'000'000'000L) {
      Fail(ErrorCode::kParse, std::string("PGM header: ") + field + " too large");
    }
    ++pos;
  }
  return value;
}

// libpng reports errors by longjmp; the two functions below keep only
// trivially destructible locals so the jump is safe.
struct PngReadState {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::span<const std::uint8_t> bytes;
  std::size_t offset = 0;
  char message[256] = {};
};

void PngReadCallback(png_structp png, png_bytep out, png_size_t count) {
  auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (state->offset + count > state->bytes.size()) {
    png_error(png, "truncated PNG stream");
  }
  std::memcpy(out, state->bytes.data() + state->offset, count);
  state->offset += count;
}

void PngErrorCallback(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngReadState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof(state->message), "%s", msg);
  png_longjmp(png, 1);
}

void PngWarningCallback(png_structp, png_const_charp) {}

bool PngReadHeader(PngReadState* state, png_uint_32* width, png_uint_32* height,
                   int* bit_depth, int* color_type) {
  if (setjmp(png_jmpbuf(state->png))) return false;
  png_set_read_fn(state->png, state, PngReadCallback);
  png_read_info(state->png, state->info);
  png_get_IHDR(state->png, state->info, width, height, bit_depth, color_type,
               nullptr, nullptr, nullptr);
  if (*color_type == PNG_COLOR_TYPE_GRAY && *bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(state->png);
  }
  if (*color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(state->png);
  png_read_update_info(state->png, state->info);
  return true;
}

bool PngReadRows(PngReadState* state, png_bytep* rows) {
  if (setjmp(png_jmpbuf(state->png))) return false;
  png_read_image(state->png, rows);
  png_read_end(state->png, nullptr);
  return true;
}

struct PngWriteState {
  std::vector<std::uint8_t>* out = nullptr;
  char message[256] = {};
};

void PngWriteCallback(png_structp png, png_bytep data, png_size_t count) {
  auto* state = static_cast<PngWriteState*>(png_get_io_ptr(png));
  state->out->insert(state->out->end(), data, data + count);
}

void PngFlushCallback(png_structp) {}

void PngWriteErrorCallback(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngWriteState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof(state->message), "%s", msg);
  png_longjmp(png, 1);
}

bool PngWriteAll(png_structp png, png_infop info, PngWriteState* state,
                 png_uint_32 width, png_uint_32 height, int bit_depth,
                 png_bytep* rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_set_write_fn(png, state, PngWriteCallback, PngFlushCallback);
  png_set_IHDR(png, info, width, height, bit_depth, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows);
  png_write_end(png, nullptr);
  return true;
}

bool HasPngSignature(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSignature, 8) == 0;
}

}  // namespace

GrayImage DecodePgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') {
    Fail(ErrorCode::kUnsupportedFormat, "not a PNM file");
  }
  if (bytes[1] != '5') {
    Fail(ErrorCode::kUnsupportedFormat,
         std::string("unsupported PNM variant P") + static_cast<char>(bytes[1]) +
             " (only binary P5 graymaps)");
  }
  std::size_t pos = 2;
  const long width = ReadHeaderNumber(bytes, pos, "width");
  const long height = ReadHeaderNumber(bytes, pos, "height");
  const long maxval = ReadHeaderNumber(bytes, pos, "maxval");
  if (width <= 0 || height <= 0) {
    Fail(ErrorCode::kParse, "PGM header: dimensions must be positive, got " +
                                std::to_string(width) + "x" + std::to_string(height));
  }
  if (maxval <= 0 || maxval > 65535) {
    Fail(ErrorCode::kParse, "PGM header: maxval " + std::to_string(maxval) +
                                " outside 1..65535");
  }
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    Fail(ErrorCode::kParse, "PGM header: missing separator before raster");
  }
  ++pos;

  const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
  const std::size_t count = static_cast<std::size_t>(width) * height;
  const std::size_t need = count * bytes_per_sample;
  const std::size_t have = bytes.size() - pos;
  if (have < need) {
    Fail(ErrorCode::kTruncated, "PGM raster truncated: expected " +
                                    std::to_string(need) + " bytes, found " +
                                    std::to_string(have));
  }
  if (have > need) {
    Fail(ErrorCode::kParse, "PGM raster has " + std::to_string(have - need) +
                                " bytes beyond the declared " +
                                std::to_string(width) + "x" +
                                std::to_string(height) + " dimensions");
  }

  std::vector<double> data(count);
  const double scale = 1.0 / static_cast<double>(maxval);
  const std::uint8_t* p = bytes.data() + pos;
  for (std::size_t i = 0; i < count; ++i) {
    unsigned code = bytes_per_sample == 2
                        ? (static_cast<unsigned>(p[2 * i]) << 8) | p[2 * i + 1]
                        : p[i];
    if (code > static_cast<unsigned>(maxval)) {
      Fail(ErrorCode::kParse, "PGM sample exceeds maxval");
    }
    data[i] = code * scale;
  }
  return GrayImage(static_cast<int>(width), static_cast<int>(height),
                   std::move(data));
}

std::vector<std::uint8_t> EncodePgm(const GrayImage& image, BitDepth depth) {
  Require(!image.empty(), "cannot encode an empty image");
  const int max_code = MaxCode(depth);
  const std::string header = "P5\n" + std::to_string(image.width()) + " " +
                             std::to_string(image.height()) + "\n" +
                             std::to_string(max_code) + "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + image.size() * (depth == BitDepth::k16 ? 2 : 1));
  for (double v : image.pixels()) {
    const unsigned code = Quantize(v, max_code);
    if (depth == BitDepth::k16) out.push_back(static_cast<std::uint8_t>(code >> 8));
    out.push_back(static_cast<std::uint8_t>(code & 0xff));
  }
  return out;
}

GrayImage DecodePng(std::span<const std::uint8_t> bytes) {
  if (!HasPngSignature(bytes)) Fail(ErrorCode::kUnsupportedFormat, "not a PNG file");
  PngReadState state;
  state.bytes = bytes;
  state.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &state,
                                     PngErrorCallback, PngWarningCallback);
  if (!state.png) Fail(ErrorCode::kIo, "libpng initialization failed");
  state.info = png_create_info_struct(state.png);
  struct Cleanup {
    PngReadState* s;
    ~Cleanup() { png_destroy_read_struct(&s->png, &s->info, nullptr); }
  } cleanup{&state};

  png_uint_32 width = 0, height = 0;
  int bit_depth = 0, color_type = 0;
  if (!PngReadHeader(&state, &width, &height, &bit_depth, &color_type)) {
    const bool truncated = std::strstr(state.message, "truncated") != nullptr;
    Fail(truncated ? ErrorCode::kTruncated : ErrorCode::kParse,
         std::string("PNG header: ") + state.message);
  }
  if ((color_type & ~PNG_COLOR_MASK_ALPHA) != PNG_COLOR_TYPE_GRAY) {
    Fail(ErrorCode::kUnsupportedFormat, "PNG is not grayscale");
  }
  const int depth = bit_depth == 16 ? 16 : 8;
  const std::size_t stride = png_get_rowbytes(state.png, state.info);
  std::vector<std::uint8_t> raster(stride * height);
  std::vector<png_bytep> rows(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = raster.data() + y * stride;
  if (!PngReadRows(&state, rows.data())) {
    const bool truncated = std::strstr(state.message, "truncated") != nullptr ||
                           std::strstr(state.message, "Not enough") != nullptr;
    Fail(truncated ? ErrorCode::kTruncated : ErrorCode::kParse,
         std::string("PNG raster: ") + state.message);
  }

  std::vector<double> data(static_cast<std::size_t>(width) * height);
  const double scale = depth == 16 ? 1.0 / 65535.0 : 1.0 / 255.0;
  for (png_uint_32 y = 0; y < height; ++y) {
    const std::uint8_t* row = rows[y];
    for (png_uint_32 x = 0; x < width; ++x) {
      const unsigned code = depth == 16 ? (row[2 * x] << 8) | row[2 * x + 1] : row[x];
      data[static_cast<std::size_t>(y) * width + x] = code * scale;
    }
  }
  return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

std::vector<std::uint8_t> EncodePng(const GrayImage& image, BitDepth depth) {
  Require(!image.empty(), "cannot encode an empty image");
  const int max_code = MaxCode(depth);
  const int bps = depth == BitDepth::k16 ? 2 : 1;
  const std::size_t stride = static_cast<std::size_t>(image.width()) * bps;
  std::vector<std::uint8_t> raster(stride * image.height());
  std::vector<png_bytep> rows(image.height());
  for (int y = 0; y < image.height(); ++y) {
    rows[y] = raster.data() + y * stride;
    for (int x = 0; x < image.width(); ++x) {
      const unsigned code = Quantize(image.at(x, y), max_code);
      if (bps == 2) {
        rows[y][2 * x] = static_cast<std::uint8_t>(code >> 8);
        rows[y][2 * x + 1] = static_cast<std::uint8_t>(code & 0xff);
      } else {
        rows[y][x] = static_cast<std::uint8_t>(code);
      }
    }
  }

  std::vector<std::uint8_t> out;
  PngWriteState state;
  state.out = &out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &state,
                                            PngWriteErrorCallback, PngWarningCallback);
  if (!png) Fail(ErrorCode::kIo, "libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  const bool ok = PngWriteAll(png, info, &state, image.width(), image.height(),
                              bps * 8, rows.data());
  png_destroy_write_struct(&png, &info);
  if (!ok) Fail(ErrorCode::kIo, std::string("PNG encode: ") + state.message);
  return out;
}

bool IsImageFile(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".pgm" || ext == ".png";
}

GrayImage LoadImage(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = ReadFile(path);
  try {
    if (HasPngSignature(bytes)) return DecodePng(bytes);
    return DecodePgm(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void SaveImage(const GrayImage& image, const std::filesystem::path& path,
               BitDepth depth) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  WriteFile(path, ext == ".png" ? EncodePng(image, depth) : EncodePgm(image, depth));
}

}  // namespace yawdeblur
