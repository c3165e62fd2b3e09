#pragma once

#include "flamegrad/optimizer.hpp"
#include "flamegrad/serialize.hpp"

#include <string>

namespace flamegrad {

/// Scene configuration for the command line: where the reference comes from,
/// how the initial parameters are built and how training/evaluation run.
struct SceneConfig {
  // Reference image: a PNG path or a builtin synthetic ("three-discs").
  std::string reference_path;
  std::string reference_builtin;

  // Initial parameters: either a shape spec initialized from init_seed, or an
  // explicit parameter file (takes precedence when set).
  SceneSpec spec;
  std::uint64_t init_seed = 0;
  std::string params_path;

  Vec3 background = Vec3::Ones();
  bool background_learnable = false;
  bool has_background_rgb = false;        // config set an explicit color
  bool has_background_learnable = false;  // config set the learnable flag

  TrainOptions train;   // render shape, iterations, seed, learning rates, clip
  EvalSettings eval;    // final render shape and sample budget
};

/// Parse a config JSON file. Unknown keys and malformed values raise
/// SchemaError with the offending field in the message.
SceneConfig load_config(const std::string& path);

/// Build the starting parameters: deserialize params_path when given,
/// otherwise init_random(init_seed, spec); background settings from the
/// config override either source.
SceneParams initial_params(const SceneConfig& config);

/// Load the reference at the requested size: builtin references are produced
/// directly at width x height, file references are read and box-resampled.
RgbBuffer load_reference(const SceneConfig& config, int width, int height);

}  // namespace flamegrad
