#pragma once

#include <functional>
#include <string_view>

#include "massimo/render.hpp"

namespace massimo::detail {

inline constexpr int kGlyphWidth = 5;
inline constexpr int kGlyphHeight = 7;

/// Width in pixels of `text` drawn at integer `scale` (one blank column between glyphs).
int text_width(std::string_view text, int scale);

/// Calls `plot` for every lit pixel of `text` with its top-left corner at
/// (x, y). Unknown characters render blank. Coordinates are not clipped.
void draw_text(const std::function<void(int, int)>& plot, int x, int y, std::string_view text, int scale);

}  // namespace massimo::detail
