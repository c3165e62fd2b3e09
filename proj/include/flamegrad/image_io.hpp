#pragma once

#include <string>

#include "flamegrad/compositor.hpp"

namespace flamegrad {

// Reads an 8-bit PNG into linear [0,1] RGB. Grayscale and palette images are
// expanded; alpha is composited over white.
RgbBuffer read_png(const std::string& path);

// Writes [0,1] RGB as an 8-bit PNG. Values are clamped, no gamma handling.
void write_png(const std::string& path, const RgbBuffer& image);

// Area-weighted box-filter resample. Exact for integer down/up ratios and
// well-behaved for fractional ones (partial source pixels weighted by
// overlap).
RgbBuffer resample(const RgbBuffer& image, int width, int height);

// Synthetic reference: three soft-edged discs (red, green, blue) on a dark
// background. Deterministic; useful for optimizer smoke tests and demos.
RgbBuffer three_discs(int width, int height);

}  // namespace flamegrad
