#pragma once

#include "flamegrad/types.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <string_view>

namespace flamegrad {

/// Nonlinear warp applied after the affine part of a generator.
/// Convention: r = sqrt(x^2 + y^2), theta = atan2(x, y)  (x in the first slot).
enum class Variation {
  Linear,
  Spherical,
  Handkerchief,
  Exponential,
  Disk,
  Heart,
  Power,
};

inline constexpr int kVariationCount = 7;

/// Floor for r / r^2 in the singular variations. Gradients are the exact
/// derivatives of the guarded functions.
inline constexpr double kGuardEps = 1e-6;

/// A generator output beyond this magnitude (or non-finite) is flagged
/// divergent and the chain restarts.
inline constexpr double kDivergenceLimit = 1e6;

constexpr std::string_view variation_name(Variation v) {
  switch (v) {
    case Variation::Linear: return "linear";
    case Variation::Spherical: return "spherical";
    case Variation::Handkerchief: return "handkerchief";
    case Variation::Exponential: return "exponential";
    case Variation::Disk: return "disk";
    case Variation::Heart: return "heart";
    case Variation::Power: return "power";
  }
  return "?";
}

inline std::optional<Variation> variation_from_name(std::string_view name) {
  for (int i = 0; i < kVariationCount; ++i) {
    auto v = static_cast<Variation>(i);
    if (variation_name(v) == name) return v;
  }
  return std::nullopt;
}

template <typename S>
Vec2T<S> apply_variation(Variation v, const Vec2T<S>& p) {
  const S x = p.x(), y = p.y();
  switch (v) {
    case Variation::Linear:
      return p;
    case Variation::Spherical: {
      const S s = std::max(x * x + y * y, S(kGuardEps));
      return Vec2T<S>(x / s, y / s);
    }
    case Variation::Handkerchief: {
      const S r = std::hypot(x, y), t = std::atan2(x, y);
      return Vec2T<S>(r * std::sin(t + r), r * std::cos(t - r));
    }
    case Variation::Exponential: {
      const S e = std::exp(x - S(1));
      return Vec2T<S>(e * std::cos(S(std::numbers::pi) * y),
                      e * std::sin(S(std::numbers::pi) * y));
    }
    case Variation::Disk: {
      const S r = std::hypot(x, y), t = std::atan2(x, y);
      const S k = t / S(std::numbers::pi), pr = S(std::numbers::pi) * r;
      return Vec2T<S>(k * std::sin(pr), k * std::cos(pr));
    }
    case Variation::Heart: {
      const S r = std::hypot(x, y), t = std::atan2(x, y);
      return Vec2T<S>(r * std::sin(t * r), -r * std::cos(t * r));
    }
    case Variation::Power: {
      const S r = std::hypot(x, y), t = std::atan2(x, y);
      const S rp = std::max(r, S(kGuardEps));
      const S a = std::pow(rp, std::sin(t));
      return Vec2T<S>(a * std::cos(t), a * std::sin(t));
    }
  }
  return p;
}

/// Jacobian d(output)/d(input); rows index the output component. Entries are
/// finite for all finite inputs: divisions are floored at kGuardEps, matching
/// the guarded forward maps away from their singular sets.
template <typename S>
Mat2T<S> variation_jacobian(Variation v, const Vec2T<S>& p) {
  const S x = p.x(), y = p.y();
  const S r2 = x * x + y * y;
  Mat2T<S> j;
  switch (v) {
    case Variation::Linear:
      return Mat2T<S>::Identity();
    case Variation::Spherical: {
      if (r2 < S(kGuardEps)) return Mat2T<S>::Identity() / S(kGuardEps);
      const S r4 = r2 * r2;
      j << (r2 - 2 * x * x) / r4, -2 * x * y / r4,
           -2 * x * y / r4, (r2 - 2 * y * y) / r4;
      return j;
    }
    default:
      break;
  }

  // Remaining variations share r / theta derivatives.
  const S r = std::hypot(x, y), t = std::atan2(x, y);
  const S rs = std::max(r, S(kGuardEps)), r2s = std::max(r2, S(kGuardEps));
  const S rx = x / rs, ry = y / rs;       // dr/dx, dr/dy
  const S tx = y / r2s, ty = -x / r2s;    // dtheta/dx, dtheta/dy
  constexpr S pi = S(std::numbers::pi);

  switch (v) {
    case Variation::Handkerchief: {
      const S sp = std::sin(t + r), cp = std::cos(t + r);
      const S sm = std::sin(t - r), cm = std::cos(t - r);
      j << rx * sp + r * cp * (tx + rx), ry * sp + r * cp * (ty + ry),
           rx * cm - r * sm * (tx - rx), ry * cm - r * sm * (ty - ry);
      return j;
    }
    case Variation::Exponential: {
      const S e = std::exp(x - S(1));
      const S c = std::cos(pi * y), s = std::sin(pi * y);
      j << e * c, -pi * e * s,
           e * s, pi * e * c;
      return j;
    }
    case Variation::Disk: {
      const S s = std::sin(pi * r), c = std::cos(pi * r);
      j << tx / pi * s + t * c * rx, ty / pi * s + t * c * ry,
           tx / pi * c - t * s * rx, ty / pi * c - t * s * ry;
      return j;
    }
    case Variation::Heart: {
      const S s = std::sin(t * r), c = std::cos(t * r);
      const S fx = tx * r + t * rx, fy = ty * r + t * ry;
      j << rx * s + r * c * fx, ry * s + r * c * fy,
           -rx * c + r * s * fx, -ry * c + r * s * fy;
      return j;
    }
    case Variation::Power: {
      const S st = std::sin(t), ct = std::cos(t);
      const S rp = std::max(r, S(kGuardEps));
      const S a = std::pow(rp, st), lr = std::log(rp);
      // d(rp)/d* vanishes where the floor is active.
      const S rpx = r > S(kGuardEps) ? rx : S(0);
      const S rpy = r > S(kGuardEps) ? ry : S(0);
      const S ax = a * (ct * tx * lr + st * rpx / rp);
      const S ay = a * (ct * ty * lr + st * rpy / rp);
      j << ax * ct - a * st * tx, ay * ct - a * st * ty,
           ax * st + a * ct * tx, ay * st + a * ct * ty;
      return j;
    }
    default:
      return Mat2T<S>::Identity();
  }
}

/// One generator: affine map followed by a variation.
struct GeneratorParams {
  AffineMap affine;
  Variation variation = Variation::Linear;
};

struct GeneratorResult {
  Vec2 point;
  bool divergent = false;
};

/// Forward application V(A p) with divergence flagging.
inline GeneratorResult apply_generator(const GeneratorParams& g, const Vec2& p) {
  const Vec2 out = apply_variation(g.variation, Vec2(g.affine(p)));
  const bool bad = !std::isfinite(out.x()) || !std::isfinite(out.y()) ||
                   std::abs(out.x()) > kDivergenceLimit ||
                   std::abs(out.y()) > kDivergenceLimit;
  return {out, bad};
}

struct GeneratorBackward {
  Vec2 adjoint_in;        // dL/d(input point)
  AffineGrad affine_grad; // dL/d(a..f)
};

/// Reverse-mode step through one generator application at input point p.
inline GeneratorBackward generator_backward(const GeneratorParams& g, const Vec2& p,
                                            const Vec2& adjoint_out) {
  const Vec2 m = g.affine(p);
  const Vec2 gm = variation_jacobian(g.variation, m).transpose() * adjoint_out;
  GeneratorBackward out;
  out.adjoint_in = g.affine.linear.transpose() * gm;
  out.affine_grad << gm.x() * p.x(), gm.x() * p.y(), gm.x(),
                     gm.y() * p.x(), gm.y() * p.y(), gm.y();
  return out;
}

}  // namespace flamegrad
