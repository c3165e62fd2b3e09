#include "flamegrad/optimizer.hpp"

#include <cmath>
#include <stdexcept>

#include "flamegrad/rng.hpp"

namespace flamegrad {

namespace {

constexpr std::uint64_t kOrderSalt = 0x6f72646572736474ull;
constexpr std::uint64_t kInitSalt = 0x696e697473656564ull;

void check_render_settings(const RenderSettings& r) {
  if (r.width <= 0 || r.height <= 0) throw std::invalid_argument("render size must be positive");
  if (r.chains <= 0 || r.steps <= 0) throw std::invalid_argument("chains and steps must be positive");
  if (r.warmup < 0) throw std::invalid_argument("warmup must be non-negative");
}

}  // namespace

double learning_rate_for(const LearningRates& rates, ParamGroup group) {
  switch (group) {
    case ParamGroup::Affine: return rates.affine;
    case ParamGroup::BetaRaw: return rates.beta_raw;
    case ParamGroup::FinalTransform: return rates.final_transform;
    case ParamGroup::Colors: return rates.colors;
    case ParamGroup::Background: return rates.background;
  }
  return 0.0;
}

std::uint64_t scene_order_seed(std::uint64_t base, std::uint64_t batch_index, int flame) {
  return mix_seed(mix_seed(mix_seed(base, kOrderSalt), batch_index),
                  static_cast<std::uint64_t>(flame));
}

std::uint64_t scene_init_seed(std::uint64_t base, std::uint64_t batch_index, int flame) {
  return mix_seed(mix_seed(mix_seed(base, kInitSalt), batch_index),
                  static_cast<std::uint64_t>(flame));
}

ForwardScene forward_scene(const SceneParams& params, const RenderSettings& render,
                           std::uint64_t seed, std::uint64_t batch_index,
                           bool record_replay, int threads) {
  check_render_settings(render);
  if (params.flames.empty()) throw std::invalid_argument("scene has no flames");

  ForwardScene fwd;
  const int F = params.flame_count();
  fwd.batches.reserve(F);
  fwd.splats.reserve(F);
  fwd.layers.reserve(F);
  fwd.paint_stats.resize(F);
  for (int f = 0; f < F; ++f) {
    const FlameParams& flame = params.flames[f];
    const GeneratorOrder order =
        draw_generator_order(scene_order_seed(seed, batch_index, f),
                             flame.generator_count(), render.chains, render.steps);
    fwd.batches.push_back(run_chaos_game(flame, order, render.warmup,
                                         scene_init_seed(seed, batch_index, f),
                                         record_replay, threads));
    fwd.splats.push_back(splat(fwd.batches.back(), flame.final_transform, render.width,
                               render.height, threads));
    fwd.layers.push_back(paint(fwd.splats.back(), flame.colors, &fwd.paint_stats[f]));
  }
  fwd.image = composite(fwd.layers, params.background);
  return fwd;
}

SceneBackward backward_scene(const SceneParams& params, const ForwardScene& fwd,
                             const RgbBuffer& reference, int threads) {
  if (static_cast<int>(fwd.layers.size()) != params.flame_count())
    throw std::invalid_argument("forward pass does not match scene");

  const CompositeLossBackward cb = composite_and_loss_backward(
      fwd.layers, params.background, params.background_learnable, reference);

  SceneBackward out;
  out.loss = cb.loss;
  out.grads = GradientSet::zeros_like(params);
  out.grads.background = cb.background;
  for (int f = 0; f < params.flame_count(); ++f) {
    const FlameParams& flame = params.flames[f];
    const PaintBackward pb =
        paint_backward(fwd.splats[f], flame.colors, cb.layer_adjoints[f]);
    out.grads.flames[f].colors = pb.color_grads;

    const SplatBackward sb =
        splat_backward(fwd.batches[f], flame.final_transform, fwd.splats[f].width,
                       fwd.splats[f].height, pb.buffer_adjoint, threads);
    out.grads.flames[f].final_transform = sb.final_transform;

    const ChaosGradients cg = chaos_game_backward(
        fwd.batches[f], flame, sb.adjoint_positions, sb.adjoint_qualities, threads);
    out.grads.flames[f].affine = cg.affine;
    out.grads.flames[f].beta_raw = cg.beta_raw;
  }
  return out;
}

TrainResult train(const SceneParams& initial, const RgbBuffer& reference,
                  const TrainOptions& options) {
  check_render_settings(options.render);
  if (options.iterations < 0) throw std::invalid_argument("iterations must be non-negative");
  if (reference.width != options.render.width || reference.height != options.render.height)
    throw std::invalid_argument("reference image does not match the render size");

  TrainResult result;
  result.params = initial;
  project_constraints(result.params);
  result.loss_history.reserve(static_cast<size_t>(options.iterations));

  for (int iter = 0; iter < options.iterations; ++iter) {
    const ForwardScene fwd =
        forward_scene(result.params, options.render, options.seed,
                      static_cast<std::uint64_t>(iter), true, options.threads);
    for (const auto& b : fwd.batches) {
      const double dead = b.dead_fraction();
      result.warnings.max_dead_fraction = std::max(result.warnings.max_dead_fraction, dead);
      if (dead > 0.01) {
        ++result.warnings.divergent_batches;
        break;
      }
    }
    for (const auto& ps : fwd.paint_stats)
      if (ps.all_zero) ++result.warnings.all_zero_paints;

    SceneBackward back = backward_scene(result.params, fwd, reference, options.threads);
    if (!std::isfinite(back.loss))
      throw std::runtime_error("training diverged: non-finite loss at iteration " +
                               std::to_string(iter));
    result.loss_history.push_back(back.loss);

    VecX g = flatten(back.grads);
    for (int i = 0; i < g.size(); ++i)
      if (!std::isfinite(g[i]))
        throw std::runtime_error("training diverged: non-finite gradient at iteration " +
                                 std::to_string(iter) + " for " +
                                 parameter_path(result.params, i));

    if (options.grad_clip_norm > 0.0) {
      const double norm = g.norm();
      if (norm > options.grad_clip_norm) g *= options.grad_clip_norm / norm;
    }

    VecX v = flatten(result.params);
    for (int i = 0; i < v.size(); ++i)
      v[i] -= learning_rate_for(options.learning_rates, group_of(result.params, i)) * g[i];
    unflatten(v, result.params);
    project_constraints(result.params);

    if (options.on_iteration) options.on_iteration(iter, back.loss);
  }
  return result;
}

GradcheckReport gradient_check(const SceneParams& params, const RgbBuffer& reference,
                               const RenderSettings& render, std::uint64_t seed,
                               double fd_step, double filter_min, int threads) {
  if (fd_step <= 0.0) throw std::invalid_argument("fd_step must be positive");

  const ForwardScene fwd = forward_scene(params, render, seed, 0, true, threads);
  const SceneBackward back = backward_scene(params, fwd, reference, threads);
  const VecX analytic = flatten(back.grads);
  const VecX v0 = flatten(params);

  const auto loss_at = [&](const VecX& v) {
    SceneParams p = params;
    unflatten(v, p);
    const ForwardScene f = forward_scene(p, render, seed, 0, false, threads);
    return mse_loss(f.image, reference);
  };

  GradcheckReport report;
  report.loss = back.loss;
  report.entries.resize(static_cast<size_t>(v0.size()));
  for (int i = 0; i < v0.size(); ++i) {
    GradcheckEntry& e = report.entries[static_cast<size_t>(i)];
    e.flat_index = i;
    e.path = parameter_path(params, i);
    e.group = group_of(params, i);
    e.analytic = analytic[i];
    if (std::abs(e.analytic) <= filter_min) continue;

    VecX v = v0;
    v[i] = v0[i] + fd_step;
    const double lp = loss_at(v);
    v[i] = v0[i] - fd_step;
    const double lm = loss_at(v);
    e.fd = (lp - lm) / (2.0 * fd_step);
    e.rel_error = std::abs(e.analytic - e.fd) /
                  std::max(std::abs(e.analytic), std::abs(e.fd));
    e.checked = true;
    if (e.rel_error > report.max_rel_error) {
      report.max_rel_error = e.rel_error;
      report.worst_index = i;
    }
  }
  return report;
}

RgbBuffer render_final(const SceneParams& params, const EvalSettings& eval, int threads) {
  if (eval.width <= 0 || eval.height <= 0) throw std::invalid_argument("render size must be positive");
  if (eval.samples <= 0) throw std::invalid_argument("samples must be positive");
  if (eval.steps <= 0 || eval.warmup < 0 || eval.max_chains_per_batch <= 0)
    throw std::invalid_argument("invalid eval settings");
  if (params.flames.empty()) throw std::invalid_argument("scene has no flames");

  std::vector<RgbaBuffer> layers;
  layers.reserve(params.flames.size());
  for (int f = 0; f < params.flame_count(); ++f) {
    const FlameParams& flame = params.flames[f];
    SplatBuffer acc = SplatBuffer::zeros(eval.width, eval.height, flame.generator_count());
    std::int64_t remaining = eval.samples;
    for (std::uint64_t batch = 0; remaining > 0; ++batch) {
      const std::int64_t want = (remaining + eval.steps - 1) / eval.steps;
      const int chains = static_cast<int>(
          std::min<std::int64_t>(want, eval.max_chains_per_batch));
      const GeneratorOrder order =
          draw_generator_order(scene_order_seed(eval.seed, batch, f),
                               flame.generator_count(), chains, eval.steps);
      const SampleBatch sb =
          run_chaos_game(flame, order, eval.warmup,
                         scene_init_seed(eval.seed, batch, f), false, threads);
      splat_accumulate(acc, sb, flame.final_transform, threads);
      remaining -= sb.sample_count();
    }
    layers.push_back(paint(acc, flame.colors));
  }
  return composite(layers, params.background);
}

}  // namespace flamegrad
