#pragma once

#include "flamegrad/types.hpp"
#include "flamegrad/variations.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace flamegrad {

/// Learnable state of one flame: N_F generators, a quality decay (stored
/// unconstrained as beta_raw), a final affine transform applied before
/// splatting, and one RGBA color per generator.
struct FlameParams {
  std::vector<GeneratorParams> generators;
  double beta_raw = 0.0;
  AffineMap final_transform;
  MatX4 colors;  // N_F x 4, rows RGBA in [0, 1]

  int generator_count() const { return static_cast<int>(generators.size()); }
};

/// Decay base used by the quality recurrence; > 1 for every finite beta_raw.
inline double effective_beta(double beta_raw) { return 1.0 + softplus(beta_raw); }
inline double effective_beta(const FlameParams& f) { return effective_beta(f.beta_raw); }

struct SceneParams {
  std::vector<FlameParams> flames;
  Vec3 background = Vec3::Ones();
  bool background_learnable = false;

  int flame_count() const { return static_cast<int>(flames.size()); }
};

/// Shape description used by init_random.
struct FlameSpec {
  int generator_count = 0;
  Variation variation = Variation::Linear;
};

struct SceneSpec {
  std::vector<FlameSpec> flames;
  bool background_learnable = false;
};

/// Random initialization: affine = identity + U(-0.5, 0.5) per linear entry,
/// translations U(-1, 1); final transform = identity; beta such that the
/// effective decay is 2; colors U(0, 1); background white unless learnable
/// (then U(0, 1)). Throws std::invalid_argument for generator_count < 2 or an
/// empty flame list.
SceneParams init_random(std::uint64_t seed, const SceneSpec& spec);

/// Clamp colors and background to [0, 1]. Other parameters are unconstrained.
/// Idempotent.
void project_constraints(SceneParams& params);

/// Structural mirror of SceneParams holding one real per learnable scalar.
struct FlameGradients {
  MatX affine;               // N_F x 6 (a..f per generator)
  double beta_raw = 0.0;
  AffineGrad final_transform = AffineGrad::Zero();
  MatX4 colors;              // N_F x 4
};

struct GradientSet {
  std::vector<FlameGradients> flames;
  Vec3 background = Vec3::Zero();

  static GradientSet zeros_like(const SceneParams& params);
};

enum class ParamGroup { Affine, BetaRaw, FinalTransform, Colors, Background };

/// Canonical flattening. Order per flame: generator affines (a..f each), then
/// beta_raw, then the final transform (a..f), then colors row-major; the
/// background triple comes last. The same layout is used for gradients,
/// updates and parameter-distance measurements.
int flat_size(const SceneParams& params);
VecX flatten(const SceneParams& params);
VecX flatten(const GradientSet& grads);
void unflatten(const VecX& v, SceneParams& params);
ParamGroup group_of(const SceneParams& params, int flat_index);
std::string parameter_path(const SceneParams& params, int flat_index);

}  // namespace flamegrad
