#include "flamegrad/painter.hpp"

#include <cmath>
#include <stdexcept>

namespace flamegrad {

namespace {

// The log-density normalizer depends on w_max = max_xy w_xy. Differentiating
// through the max (subgradient at the arg-max pixel) keeps the backward pass
// the exact adjoint of the forward map, which end-to-end finite-difference
// checks require; treating w_max as a constant leaves a measurable gap.
constexpr bool kWmaxGradient = true;

void check_colors(const SplatBuffer& buffer, const MatX4& colors) {
  if (colors.rows() != buffer.channels)
    throw std::invalid_argument("paint: one RGBA color per buffer channel required");
}

}  // namespace

RgbaBuffer paint(const SplatBuffer& buffer, const MatX4& colors, PaintStats* stats) {
  check_colors(buffer, colors);
  const Eigen::Index n = buffer.data.rows();
  RgbaBuffer out;
  out.width = buffer.width;
  out.height = buffer.height;
  out.data = MatX4::Zero(n, 4);

  const VecX w = buffer.data.rowwise().sum();
  Eigen::Index argmax = 0;
  const double w_max = n > 0 ? w.maxCoeff(&argmax) : 0.0;
  if (stats) {
    stats->all_zero = !(w_max > 0.0);
    stats->w_max = w_max;
    stats->argmax = argmax;
    stats->alpha_at_argmax = 0.0;
  }
  if (!(w_max > 0.0)) return out;  // fully transparent; caller may warn

  const MatX4 u = buffer.data * colors;  // per-pixel color-weighted quality
  const double denom = std::log(std::max(w_max, 1.0 + kWeightEps));
  if (stats)
    stats->alpha_at_argmax = clamp01(std::log(std::max(w_max, kWeightEps)) / denom);
  for (Eigen::Index p = 0; p < n; ++p) {
    const double wp = w[p];
    if (wp <= 0.0) continue;
    const double alpha = clamp01(std::log(std::max(wp, kWeightEps)) / denom);
    const double s = alpha / wp;
    for (int c = 0; c < 4; ++c) out.data(p, c) = clamp01(s * u(p, c));
  }
  return out;
}

PaintBackward paint_backward(const SplatBuffer& buffer, const MatX4& colors,
                             const MatX4& image_adjoint) {
  check_colors(buffer, colors);
  const Eigen::Index n = buffer.data.rows();
  if (image_adjoint.rows() != n)
    throw std::invalid_argument("paint_backward: adjoint shape mismatch");

  PaintBackward out;
  out.buffer_adjoint = MatX::Zero(n, buffer.channels);
  out.color_grads = MatX4::Zero(buffer.channels, 4);

  const VecX w = buffer.data.rowwise().sum();
  Eigen::Index argmax = 0;
  const double w_max = n > 0 ? w.maxCoeff(&argmax) : 0.0;
  if (!(w_max > 0.0)) return out;

  const MatX4 u = buffer.data * colors;
  const bool denom_floored = w_max <= 1.0 + kWeightEps;
  const double denom = std::log(std::max(w_max, 1.0 + kWeightEps));

  MatX4 scaled = MatX4::Zero(n, 4);  // rows: (alpha/w) * masked image adjoint
  VecX dw = VecX::Zero(n);           // direct dL/dw per pixel
  double dwmax = 0.0;
  for (Eigen::Index p = 0; p < n; ++p) {
    const double wp = w[p];
    if (wp <= 0.0) continue;
    const double wf = std::max(wp, kWeightEps);
    const double alpha_pre = std::log(wf) / denom;
    const double alpha = clamp01(alpha_pre);
    const double s = alpha / wp;
    double dalpha = 0.0;
    double dldw = 0.0;
    for (int c = 0; c < 4; ++c) {
      const double pre = s * u(p, c);
      if (pre < 0.0 || pre > 1.0) continue;  // clamp subgradient
      const double g = image_adjoint(p, c);
      scaled(p, c) = s * g;
      dalpha += u(p, c) * g / wp;
      dldw -= s / wp * u(p, c) * g;
    }
    if (alpha_pre >= 0.0 && alpha_pre <= 1.0) {
      if (wp > kWeightEps) dldw += dalpha / (denom * wf);
      if (kWmaxGradient && !denom_floored)
        dwmax -= dalpha * alpha_pre / (denom * w_max);
    }
    dw[p] = dldw;
  }

  out.color_grads = buffer.data.transpose() * scaled;
  out.buffer_adjoint = scaled * colors.transpose();
  out.buffer_adjoint.colwise() += dw;
  if (kWmaxGradient) out.buffer_adjoint.row(argmax).array() += dwmax;
  return out;
}

}  // namespace flamegrad
