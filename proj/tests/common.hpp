#pragma once

#include <doctest.h>

#include <cmath>
#include <random>

#include "flamegrad/params.hpp"
#include "flamegrad/rng.hpp"
#include "flamegrad/sampler.hpp"

namespace testutil {

inline double rel_error(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

/// Bitwise equality for Eigen expressions (shape and every entry).
template <class A, class B>
bool same_values(const A& a, const B& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         (a.array() == b.array()).all();
}

/// Four contractive linear generators spreading mass into distinct corners;
/// chains stay well inside NDC [-1,1]^2, no divergence, no image-border
/// contact. The workhorse scene for sampler/splatter tests.
inline flamegrad::FlameParams contractive_flame() {
  using namespace flamegrad;
  FlameParams flame;
  const double coeffs[4][6] = {
      {0.42, 0.05, -0.45, -0.04, 0.39, -0.48},
      {0.38, -0.08, 0.47, 0.06, 0.43, -0.42},
      {0.45, 0.03, -0.41, 0.07, 0.37, 0.46},
      {0.40, -0.05, 0.44, -0.06, 0.42, 0.43},
  };
  for (const auto& c : coeffs) {
    GeneratorParams g;
    g.affine = AffineMap::from_coeffs({c[0], c[1], c[2], c[3], c[4], c[5]});
    g.variation = Variation::Linear;
    flame.generators.push_back(g);
  }
  flame.beta_raw = inverse_softplus(1.0);  // effective beta = 2
  flame.final_transform = AffineMap::identity();
  flame.colors.resize(4, 4);
  flame.colors << 0.85, 0.20, 0.15, 0.80,
                  0.15, 0.75, 0.25, 0.70,
                  0.20, 0.30, 0.85, 0.90,
                  0.80, 0.70, 0.15, 0.60;
  return flame;
}

/// A generator order with hand-picked indices (tests that need a forced
/// sequence rather than a seeded draw).
inline flamegrad::GeneratorOrder forced_order(std::initializer_list<int> gens,
                                              int n_generators) {
  flamegrad::GeneratorOrder order;
  order.n_generators = n_generators;
  order.indices.resize(1, static_cast<Eigen::Index>(gens.size()));
  Eigen::Index t = 0;
  for (int g : gens) order.indices(0, t++) = g;
  return order;
}

}  // namespace testutil
