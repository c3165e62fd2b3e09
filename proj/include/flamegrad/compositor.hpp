#pragma once

#include "flamegrad/painter.hpp"

#include <vector>

namespace flamegrad {

struct RgbBuffer {
  int width = 0, height = 0;
  MatX3 data;  // (H*W) x 3

  static RgbBuffer filled(int width, int height, const Vec3& rgb) {
    RgbBuffer b;
    b.width = width;
    b.height = height;
    b.data = MatX3(static_cast<Eigen::Index>(width) * height, 3);
    b.data.rowwise() = rgb.transpose();
    return b;
  }
};

/// Straight-alpha over, bottom layer first, onto a solid background:
/// out = a * src + (1 - a) * out.
RgbBuffer composite(const std::vector<RgbaBuffer>& layers, const Vec3& background);

/// Mean squared error over all pixels and channels.
double mse_loss(const RgbBuffer& image, const RgbBuffer& reference);

struct CompositeLossBackward {
  double loss = 0.0;
  std::vector<MatX4> layer_adjoints;  // dL/d(layer rgba)
  Vec3 background = Vec3::Zero();     // zero unless background_learnable
};

/// Forward + reverse pass for mse_loss(composite(layers, background), ref).
CompositeLossBackward composite_and_loss_backward(const std::vector<RgbaBuffer>& layers,
                                                  const Vec3& background,
                                                  bool background_learnable,
                                                  const RgbBuffer& reference);

}  // namespace flamegrad
