#include <stdexcept>

#include "massimo/render.hpp"

namespace massimo {

PixelBuffer::PixelBuffer(int width, int height, Rgb fill) : width_(width), height_(height)
{
  if (width <= 0 || height <= 0) throw RenderError("pixel buffer dimensions must be positive");
  pixels_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
  for (std::size_t i = 0; i < pixels_.size(); i += 3) {
    pixels_[i] = fill.r;
    pixels_[i + 1] = fill.g;
    pixels_[i + 2] = fill.b;
  }
}

Rgb PixelBuffer::at(int x, int y) const
{
  if (!contains(x, y)) throw std::out_of_range("pixel outside buffer");
  const std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
}

void PixelBuffer::set(int x, int y, Rgb c)
{
  if (!contains(x, y)) return;
  const std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  pixels_[i] = c.r;
  pixels_[i + 1] = c.g;
  pixels_[i + 2] = c.b;
}

}  // namespace massimo
