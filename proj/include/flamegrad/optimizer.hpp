#pragma once

#include "flamegrad/compositor.hpp"
#include "flamegrad/painter.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace flamegrad {

/// Per-group step sizes for plain gradient descent.
struct LearningRates {
  double affine = 0.01;
  double final_transform = 0.005;
  double colors = 0.05;
  double beta_raw = 0.01;
  double background = 0.05;
};

double learning_rate_for(const LearningRates& rates, ParamGroup group);

/// Shape of one training forward pass.
struct RenderSettings {
  int width = 0;
  int height = 0;
  int chains = 0;  // B
  int steps = 0;   // T emitted samples per chain
  int warmup = 20;
};

/// Seeds for batch `batch_index` of flame `flame`. Training iteration i uses
/// batch_index = i; rendering enumerates batch 0, 1, ... with the same scheme,
/// so a training-shaped render reproduces the training forward pass exactly.
std::uint64_t scene_order_seed(std::uint64_t base, std::uint64_t batch_index, int flame);
std::uint64_t scene_init_seed(std::uint64_t base, std::uint64_t batch_index, int flame);

struct ForwardScene {
  std::vector<SampleBatch> batches;   // one per flame
  std::vector<SplatBuffer> splats;
  std::vector<RgbaBuffer> layers;
  std::vector<PaintStats> paint_stats;
  RgbBuffer image;
};

ForwardScene forward_scene(const SceneParams& params, const RenderSettings& render,
                           std::uint64_t seed, std::uint64_t batch_index,
                           bool record_replay, int threads = 1);

struct SceneBackward {
  double loss = 0.0;
  GradientSet grads;
};

/// Reverse-mode gradients of mse_loss(composite, reference) with respect to
/// every learnable parameter. `fwd` must have been recorded with replay.
SceneBackward backward_scene(const SceneParams& params, const ForwardScene& fwd,
                             const RgbBuffer& reference, int threads = 1);

struct TrainOptions {
  RenderSettings render;
  int iterations = 0;
  std::uint64_t seed = 0;
  LearningRates learning_rates;
  double grad_clip_norm = 1.0;  // global L2 clip; <= 0 disables
  int threads = 1;
  /// Called once per iteration with (iteration, loss on that iteration's
  /// batch before the update). Optional.
  std::function<void(int, double)> on_iteration;
};

struct TrainWarnings {
  int divergent_batches = 0;       // iterations where > 1% of samples died
  double max_dead_fraction = 0.0;
  int all_zero_paints = 0;         // flame layers with no positive weight
};

struct TrainResult {
  SceneParams params;
  std::vector<double> loss_history;  // one entry per iteration, pre-update loss
  TrainWarnings warnings;
};

/// Plain SGD: every iteration draws a fresh batch (batch_index = iteration),
/// runs forward + backward, clips the global gradient norm, applies per-group
/// learning rates and projects colors/background back to [0, 1]. Throws
/// std::runtime_error when the loss or any gradient turns non-finite, naming
/// the iteration and the first offending parameter.
TrainResult train(const SceneParams& initial, const RgbBuffer& reference,
                  const TrainOptions& options);

struct GradcheckEntry {
  int flat_index = -1;
  std::string path;
  ParamGroup group = ParamGroup::Affine;
  double analytic = 0.0;
  double fd = 0.0;
  double rel_error = 0.0;
  bool checked = false;  // false when |analytic| <= filter threshold
};

struct GradcheckReport {
  std::vector<GradcheckEntry> entries;  // one per flat parameter
  double loss = 0.0;
  double max_rel_error = 0.0;
  int worst_index = -1;  // flat index attaining max_rel_error, -1 if none

  const GradcheckEntry* worst() const {
    return worst_index < 0 ? nullptr : &entries[static_cast<size_t>(worst_index)];
  }
};

/// Central finite differences against the analytic gradient on one frozen
/// batch (batch_index 0 of `seed`; the generator order and chain starts do
/// not depend on the parameters, so the loss is a deterministic function of
/// the flat vector). rel_error = |a - fd| / max(|a|, |fd|), computed for
/// entries with |analytic| > filter_min.
GradcheckReport gradient_check(const SceneParams& params, const RgbBuffer& reference,
                               const RenderSettings& render, std::uint64_t seed,
                               double fd_step = 1e-4, double filter_min = 1e-6,
                               int threads = 1);

struct EvalSettings {
  int width = 0;
  int height = 0;
  std::int64_t samples = 0;  // minimum emitted samples per flame
  int steps = 64;            // chain length per rendering batch
  int warmup = 20;
  std::uint64_t seed = 0;
  int max_chains_per_batch = 1 << 16;  // memory cap per batch
};

/// Full-quality render: accumulates chaos-game batches (without replay) into
/// one splat buffer per flame, paints once, composites. Reuses the training
/// forward path, including the per-batch seed scheme.
RgbBuffer render_final(const SceneParams& params, const EvalSettings& eval,
                       int threads = 1);

}  // namespace flamegrad
