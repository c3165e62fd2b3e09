#pragma once

#include "flamegrad/sampler.hpp"

namespace flamegrad {

/// Per-generator accumulation image. Row y*width + x holds the N_F quality
/// sums deposited near pixel (x, y).
struct SplatBuffer {
  int width = 0, height = 0, channels = 0;
  MatX data;  // (height*width) x channels

  static SplatBuffer zeros(int width, int height, int channels) {
    SplatBuffer b;
    b.width = width;
    b.height = height;
    b.channels = channels;
    b.data = MatX::Zero(static_cast<Eigen::Index>(width) * height, channels);
    return b;
  }
};

// Gaussian splat weight exp(-2 d^2) over the 3x3 neighborhood, rolled off
// smoothly to zero just past the diagonal (d^2 in (2.02, 2.25)) so deposits
// vanish with zero value and slope at the window edge. The pinned kernel
// values at d^2 = 0, 1, 2 are untouched, and the splat becomes a C^1
// function of the sample position, which finite-difference gradient checks
// rely on.
inline constexpr double kKernelRollStart = 2.02;
inline constexpr double kKernelRollEnd = 2.25;

/// Weight as a function of squared distance d2 from a pixel center.
inline double kernel_weight(double d2) {
  if (d2 >= kKernelRollEnd) return 0.0;
  double w = std::exp(-2.0 * d2);
  if (d2 > kKernelRollStart) {
    const double t = (kKernelRollEnd - d2) / (kKernelRollEnd - kKernelRollStart);
    w *= t * t * (3.0 - 2.0 * t);
  }
  return w;
}

/// d(kernel_weight)/d(d2).
inline double kernel_weight_deriv(double d2) {
  if (d2 >= kKernelRollEnd) return 0.0;
  const double e = std::exp(-2.0 * d2);
  if (d2 <= kKernelRollStart) return -2.0 * e;
  const double span = kKernelRollEnd - kKernelRollStart;
  const double t = (kKernelRollEnd - d2) / span;
  const double g = t * t * (3.0 - 2.0 * t);
  const double dg = -6.0 * t * (1.0 - t) / span;
  return e * (-2.0 * g + dg);
}

/// Deposit every alive sample into `buffer`: the final transform maps sample
/// space to NDC [-1,1]^2, NDC maps to pixel coordinates (y axis down), and
/// the 3x3 neighborhood of the center pixel receives q * kernel_weight(d^2).
/// Samples whose center pixel is outside the image contribute nothing.
void splat_accumulate(SplatBuffer& buffer, const SampleBatch& batch,
                      const AffineMap& final_transform, int threads = 1);

SplatBuffer splat(const SampleBatch& batch, const AffineMap& final_transform, int width,
                  int height, int threads = 1);

struct SplatBackward {
  MatX2 adjoint_positions;  // dL/d(sample position), zero for dead samples
  MatX adjoint_qualities;   // dL/d(sample quality)
  AffineGrad final_transform = AffineGrad::Zero();
};

SplatBackward splat_backward(const SampleBatch& batch, const AffineMap& final_transform,
                             int width, int height, const MatX& buffer_adjoint,
                             int threads = 1);

}  // namespace flamegrad
