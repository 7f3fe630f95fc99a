#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "vrecon/img/image.hpp"

namespace vrecon::img {

using PngImage = std::variant<GrayImage, VectorImage>;

// Decodes gray (1-16 bit), gray+alpha, palette, RGB and RGBA PNGs. Alpha is
// dropped; gray sources yield GrayImage, colour sources VectorImage. Values
// are mapped linearly to [0,1]. Throws DecodeError with the byte offset.
PngImage read_png(std::span<const std::uint8_t> bytes);
// Same, converting colour to Rec.601 luma.
GrayImage read_png_gray(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> write_png(const GrayImage& img, int bit_depth = 8);
std::vector<std::uint8_t> write_png(const VectorImage& img);

bool has_png_signature(std::span<const std::uint8_t> bytes);

}  // namespace vrecon::img
