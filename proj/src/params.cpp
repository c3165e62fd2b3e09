#include "flamegrad/params.hpp"

#include "flamegrad/rng.hpp"

#include <stdexcept>

namespace flamegrad {

namespace {

constexpr const char* kAffineNames = "abcdef";

// beta_raw giving effective_beta == 2, i.e. softplus(raw) == 1.
const double kBetaRawForTwo = inverse_softplus(1.0);

}  // namespace

SceneParams init_random(std::uint64_t seed, const SceneSpec& spec) {
  if (spec.flames.empty()) throw std::invalid_argument("init_random: empty flame list");
  for (const auto& f : spec.flames)
    if (f.generator_count < 2)
      throw std::invalid_argument("init_random: generator_count must be >= 2");

  auto rng = make_rng(seed);
  SceneParams out;
  out.background_learnable = spec.background_learnable;
  for (const auto& fs : spec.flames) {
    FlameParams flame;
    flame.beta_raw = kBetaRawForTwo;
    flame.final_transform = AffineMap::identity();
    for (int i = 0; i < fs.generator_count; ++i) {
      GeneratorParams g;
      g.variation = fs.variation;
      g.affine.linear << 1.0 + uniform_real(rng, -0.5, 0.5), uniform_real(rng, -0.5, 0.5),
                         uniform_real(rng, -0.5, 0.5), 1.0 + uniform_real(rng, -0.5, 0.5);
      g.affine.translation << uniform_real(rng, -1.0, 1.0), uniform_real(rng, -1.0, 1.0);
      flame.generators.push_back(g);
    }
    flame.colors.resize(fs.generator_count, 4);
    for (int i = 0; i < fs.generator_count; ++i)
      for (int c = 0; c < 4; ++c) flame.colors(i, c) = unit_real(rng);
    out.flames.push_back(std::move(flame));
  }
  if (spec.background_learnable)
    out.background << unit_real(rng), unit_real(rng), unit_real(rng);
  else
    out.background = Vec3::Ones();
  return out;
}

void project_constraints(SceneParams& params) {
  for (auto& f : params.flames)
    f.colors = f.colors.cwiseMax(0.0).cwiseMin(1.0);
  params.background = params.background.cwiseMax(0.0).cwiseMin(1.0);
}

GradientSet GradientSet::zeros_like(const SceneParams& params) {
  GradientSet g;
  for (const auto& f : params.flames) {
    FlameGradients fg;
    fg.affine = MatX::Zero(f.generator_count(), 6);
    fg.colors = MatX4::Zero(f.generator_count(), 4);
    g.flames.push_back(std::move(fg));
  }
  return g;
}

int flat_size(const SceneParams& params) {
  int n = 3;  // background
  for (const auto& f : params.flames) n += f.generator_count() * 10 + 7;
  return n;
}

VecX flatten(const SceneParams& params) {
  VecX v(flat_size(params));
  int i = 0;
  for (const auto& f : params.flames) {
    for (const auto& g : f.generators)
      for (double x : g.affine.coeffs()) v[i++] = x;
    v[i++] = f.beta_raw;
    for (double x : f.final_transform.coeffs()) v[i++] = x;
    for (Eigen::Index r = 0; r < f.colors.rows(); ++r)
      for (int ch = 0; ch < 4; ++ch) v[i++] = f.colors(r, ch);
  }
  for (int ch = 0; ch < 3; ++ch) v[i++] = params.background(ch);
  return v;
}

VecX flatten(const GradientSet& grads) {
  int n = 3;
  for (const auto& f : grads.flames) n += static_cast<int>(f.affine.rows()) * 10 + 7;
  VecX v(n);
  int i = 0;
  for (const auto& f : grads.flames) {
    for (Eigen::Index r = 0; r < f.affine.rows(); ++r)
      for (int k = 0; k < 6; ++k) v[i++] = f.affine(r, k);
    v[i++] = f.beta_raw;
    for (int k = 0; k < 6; ++k) v[i++] = f.final_transform(k);
    for (Eigen::Index r = 0; r < f.colors.rows(); ++r)
      for (int ch = 0; ch < 4; ++ch) v[i++] = f.colors(r, ch);
  }
  for (int ch = 0; ch < 3; ++ch) v[i++] = grads.background(ch);
  return v;
}

void unflatten(const VecX& v, SceneParams& params) {
  int i = 0;
  for (auto& f : params.flames) {
    for (auto& g : f.generators) {
      std::array<double, 6> c;
      for (double& x : c) x = v[i++];
      g.affine = AffineMap::from_coeffs(c);
    }
    f.beta_raw = v[i++];
    std::array<double, 6> c;
    for (double& x : c) x = v[i++];
    f.final_transform = AffineMap::from_coeffs(c);
    for (Eigen::Index r = 0; r < f.colors.rows(); ++r)
      for (int ch = 0; ch < 4; ++ch) f.colors(r, ch) = v[i++];
  }
  for (int ch = 0; ch < 3; ++ch) params.background(ch) = v[i++];
}

ParamGroup group_of(const SceneParams& params, int flat_index) {
  int i = flat_index;
  for (const auto& f : params.flames) {
    const int n = f.generator_count();
    if (i < n * 6) return ParamGroup::Affine;
    i -= n * 6;
    if (i < 1) return ParamGroup::BetaRaw;
    i -= 1;
    if (i < 6) return ParamGroup::FinalTransform;
    i -= 6;
    if (i < n * 4) return ParamGroup::Colors;
    i -= n * 4;
  }
  return ParamGroup::Background;
}

std::string parameter_path(const SceneParams& params, int flat_index) {
  int i = flat_index;
  for (int fi = 0; fi < params.flame_count(); ++fi) {
    const int n = params.flames[fi].generator_count();
    const std::string base = "flames[" + std::to_string(fi) + "].";
    if (i < n * 6)
      return base + "generators[" + std::to_string(i / 6) + "].affine." +
             kAffineNames[i % 6];
    i -= n * 6;
    if (i < 1) return base + "beta_raw";
    i -= 1;
    if (i < 6) return base + "final_transform." + kAffineNames[i];
    i -= 6;
    if (i < n * 4) {
      static constexpr const char* kCh[] = {"r", "g", "b", "a"};
      return base + "colors[" + std::to_string(i / 4) + "]." + kCh[i % 4];
    }
    i -= n * 4;
  }
  static constexpr const char* kBg[] = {"background.r", "background.g", "background.b"};
  return kBg[i];
}

}  // namespace flamegrad
