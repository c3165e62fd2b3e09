#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>

namespace flamegrad {

template <typename S> using Vec2T = Eigen::Matrix<S, 2, 1>;
template <typename S> using Mat2T = Eigen::Matrix<S, 2, 2>;

using Vec2 = Vec2T<double>;
using Mat2 = Mat2T<double>;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using VecX = Eigen::VectorXd;

// Sample-major buffers: one row per sample / pixel, rows contiguous.
using MatX  = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatX2 = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;
using MatX3 = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using MatX4 = Eigen::Matrix<double, Eigen::Dynamic, 4, Eigen::RowMajor>;

/// 2D affine map p -> linear * p + translation.
/// Coefficients are named (a, b, c, d, e, f) with
///   x' = a*x + b*y + c,  y' = d*x + e*y + f.
template <typename S>
struct AffineMapT {
  Mat2T<S> linear = Mat2T<S>::Identity();
  Vec2T<S> translation = Vec2T<S>::Zero();

  Vec2T<S> operator()(const Vec2T<S>& p) const { return linear * p + translation; }

  static AffineMapT identity() { return {}; }

  static AffineMapT from_coeffs(const std::array<S, 6>& c) {
    AffineMapT m;
    m.linear << c[0], c[1], c[3], c[4];
    m.translation << c[2], c[5];
    return m;
  }

  std::array<S, 6> coeffs() const {
    return {linear(0, 0), linear(0, 1), translation(0),
            linear(1, 0), linear(1, 1), translation(1)};
  }
};

using AffineMap = AffineMapT<double>;

/// Gradient of a scalar loss with respect to the six affine coefficients,
/// in (a, b, c, d, e, f) order.
using AffineGrad = Eigen::Matrix<double, 6, 1>;

inline double softplus(double t) {
  // Stable for large |t|; strictly positive for all finite t.
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

inline double sigmoid(double t) {
  return t > 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

/// Inverse of softplus: softplus(inverse_softplus(y)) == y for y > 0.
inline double inverse_softplus(double y) {
  // log(e^y - 1), written to stay stable for small and large y.
  return y > 20.0 ? y : std::log(std::expm1(y));
}

inline double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

}  // namespace flamegrad
