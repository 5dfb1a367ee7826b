#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "yawdeblur/core/image.h"

namespace yawdeblur {

enum class BitDepth { k8 = 8, k16 = 16 };

// Binary PGM ("P5", 8- or 16-bit big-endian) or grayscale PNG, detected from
// the file signature. Values are scaled to [0,1] by 1/maxval.
GrayImage LoadImage(const std::filesystem::path& path);

// Writes PGM unless the extension is ".png". Values are clipped to [0,1]
// and rounded to the nearest code.
void SaveImage(const GrayImage& image, const std::filesystem::path& path,
               BitDepth depth = BitDepth::k16);

GrayImage DecodePgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> EncodePgm(const GrayImage& image, BitDepth depth);

GrayImage DecodePng(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> EncodePng(const GrayImage& image, BitDepth depth);

bool IsImageFile(const std::filesystem::path& path);

}  // namespace yawdeblur
