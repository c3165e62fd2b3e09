#pragma once

#include "flamegrad/splatter.hpp"

namespace flamegrad {

/// Straight-alpha RGBA image in [0, 1], one row per pixel.
struct RgbaBuffer {
  int width = 0, height = 0;
  MatX4 data;
};

/// Floor inside the alpha logarithms.
inline constexpr double kWeightEps = 1e-8;

struct PaintStats {
  bool all_zero = false;  // warning: buffer had no positive weight
  double w_max = 0.0;
  Eigen::Index argmax = 0;
  // Tone-map alpha at the argmax pixel, computed exactly as the pixel loop
  // does. Equals 1.0 bit-exactly whenever w_max exceeds the floor 1 + eps.
  double alpha_at_argmax = 0.0;
};

/// Log-density tone mapping. Per pixel with total weight w = sum_i q_i:
///   alpha = clamp(ln(max(w, eps)) / ln(max(w_max, 1 + eps)), 0, 1)
///   rgba  = clamp((alpha / w) * sum_i colors_i q_i, 0, 1)
/// Zero-weight pixels are fully transparent black. The pixel holding w_max
/// gets alpha == 1 exactly.
RgbaBuffer paint(const SplatBuffer& buffer, const MatX4& colors,
                 PaintStats* stats = nullptr);

struct PaintBackward {
  MatX buffer_adjoint;  // dL/d(splat buffer), (H*W) x N_F
  MatX4 color_grads;    // N_F x 4
};

/// Adjoint of paint for a given dL/d(image). Gradients follow the clamped
/// forward exactly (clamp subgradient zero outside [0, 1]); the w_max
/// dependence of the normalizer is routed to the pixel attaining the max, so
/// the analytic gradient matches finite differences of the whole map.
PaintBackward paint_backward(const SplatBuffer& buffer, const MatX4& colors,
                             const MatX4& image_adjoint);

}  // namespace flamegrad
