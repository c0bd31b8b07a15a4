#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "massimo/render.hpp"

namespace massimo {

/// Decodes a PNG (any bit depth / colour type) into 8-bit RGB. Alpha is
/// composited onto black. Throws RenderError on undecodable input.
PixelBuffer decode_png(std::span<const std::uint8_t> bytes);
PixelBuffer read_png(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const PixelBuffer& image);
void write_png(const std::filesystem::path& path, const PixelBuffer& image);

}  // namespace massimo
