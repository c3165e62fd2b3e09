#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "flamegrad/config.hpp"
#include "flamegrad/image_io.hpp"
#include "flamegrad/optimizer.hpp"
#include "flamegrad/parallel.hpp"
#include "flamegrad/serialize.hpp"

namespace fs = std::filesystem;
using namespace flamegrad;

namespace {

// Exit codes: 0 success, 1 runtime failure, 2 refusing to overwrite,
// 3 gradient check out of tolerance.
constexpr int kExitError = 1;
constexpr int kExitExists = 2;
constexpr int kExitGradcheck = 3;

struct ExitWith {
  int code;
  std::string message;
};

void require_writable(const fs::path& path, bool force) {
  if (fs::exists(path) && !force)
    throw ExitWith{kExitExists,
                   "refusing to overwrite " + path.string() + " (use --force)"};
}

void write_loss_csv(const fs::path& path, const std::vector<double>& losses) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "iteration,loss\n";
  char buf[64];
  for (size_t i = 0; i < losses.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i, losses[i]);
    out << buf;
  }
}

void write_params_json(const fs::path& path, const SceneParams& params) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << serialize(params);
}

SceneParams read_params_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open params: " + path);
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  return deserialize(text);
}

int run_train(const std::string& config_path, const std::string& out_dir, bool force,
              bool deterministic, int threads, std::int64_t seed_override,
              int iterations_override) {
  SceneConfig config = load_config(config_path);
  if (seed_override >= 0) config.train.seed = static_cast<std::uint64_t>(seed_override);
  if (iterations_override >= 0) config.train.iterations = iterations_override;
  config.train.threads = deterministic ? 1 : resolve_threads(threads);

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  const fs::path params_path = dir / "params.json";
  const fs::path loss_path = dir / "loss.csv";
  const fs::path preview_path = dir / "preview.png";
  require_writable(params_path, force);
  require_writable(loss_path, force);
  require_writable(preview_path, force);

  const SceneParams initial = initial_params(config);
  const RgbBuffer reference =
      load_reference(config, config.train.render.width, config.train.render.height);

  const int report_every = std::max(1, config.train.iterations / 20);
  config.train.on_iteration = [&](int iter, double loss) {
    if (iter % report_every == 0 || iter + 1 == config.train.iterations)
      std::printf("iter %6d  loss %.8g\n", iter, loss);
  };

  const TrainResult result = train(initial, reference, config.train);

  write_loss_csv(loss_path, result.loss_history);
  write_params_json(params_path, result.params);
  const RgbBuffer preview = render_final(result.params, config.eval, config.train.threads);
  write_png(preview_path.string(), preview);

  if (result.warnings.divergent_batches > 0)
    std::fprintf(stderr, "warning: %d iterations lost > 1%% of samples to divergence (max %.2f%%)\n",
                 result.warnings.divergent_batches, 100.0 * result.warnings.max_dead_fraction);
  if (result.warnings.all_zero_paints > 0)
    std::fprintf(stderr, "warning: %d flame layers rendered with zero weight\n",
                 result.warnings.all_zero_paints);
  if (!result.loss_history.empty())
    std::printf("final loss %.8g (initial %.8g)\n", result.loss_history.back(),
                result.loss_history.front());
  std::printf("wrote %s, %s, %s\n", params_path.c_str(), loss_path.c_str(),
              preview_path.c_str());
  return 0;
}

int run_render(const std::string& params_path, const std::string& out_file, bool force,
               int width, int height, std::int64_t samples, std::uint64_t seed, int steps,
               int warmup, int threads) {
  require_writable(out_file, force);
  const SceneParams params = read_params_json(params_path);
  EvalSettings eval;
  eval.width = width;
  eval.height = height;
  eval.samples = samples;
  eval.steps = steps;
  eval.warmup = warmup;
  eval.seed = seed;
  const RgbBuffer image = render_final(params, eval, resolve_threads(threads));
  write_png(out_file, image);
  std::printf("wrote %s (%dx%d, %" PRId64 " samples per flame)\n", out_file.c_str(), width,
              height, samples);
  return 0;
}

const char* group_label(ParamGroup g) {
  switch (g) {
    case ParamGroup::Affine: return "affine";
    case ParamGroup::BetaRaw: return "beta_raw";
    case ParamGroup::FinalTransform: return "final_transform";
    case ParamGroup::Colors: return "colors";
    case ParamGroup::Background: return "background";
  }
  return "?";
}

int run_gradcheck(const std::string& config_path, double tolerance, double fd_step,
                  int threads) {
  const SceneConfig config = load_config(config_path);
  const SceneParams params = initial_params(config);
  const RgbBuffer reference =
      load_reference(config, config.train.render.width, config.train.render.height);

  if (tolerance <= 0.0) {
    // Default tolerance: tight for all-linear scenes, relaxed when any
    // nonlinear variation participates.
    bool all_linear = true;
    for (const auto& flame : params.flames)
      for (const auto& g : flame.generators)
        if (g.variation != Variation::Linear) all_linear = false;
    tolerance = all_linear ? 1e-3 : 1e-2;
  }

  const GradcheckReport report =
      gradient_check(params, reference, config.train.render, config.train.seed, fd_step,
                     1e-6, resolve_threads(threads));

  double group_max[5] = {0, 0, 0, 0, 0};
  int checked = 0;
  for (const auto& e : report.entries) {
    if (!e.checked) continue;
    ++checked;
    double& gm = group_max[static_cast<int>(e.group)];
    gm = std::max(gm, e.rel_error);
  }
  std::printf("loss %.8g, %d of %zu parameters checked (|analytic| > 1e-6)\n", report.loss,
              checked, report.entries.size());
  for (int g = 0; g < 5; ++g)
    if (group_max[g] > 0.0)
      std::printf("  %-16s max rel error %.3e\n",
                  group_label(static_cast<ParamGroup>(g)), group_max[g]);
  if (const GradcheckEntry* worst = report.worst())
    std::printf("worst: %s  analytic %.8e  fd %.8e  rel %.3e\n", worst->path.c_str(),
                worst->analytic, worst->fd, worst->rel_error);
  if (report.max_rel_error > tolerance) {
    std::printf("FAIL: max rel error %.3e exceeds tolerance %.1e\n", report.max_rel_error,
                tolerance);
    return kExitGradcheck;
  }
  std::printf("OK: max rel error %.3e within tolerance %.1e\n", report.max_rel_error,
              tolerance);
  return 0;
}

int run_make_reference(const std::string& name, const std::string& out_file, bool force,
                       int width, int height) {
  require_writable(out_file, force);
  if (name != "three-discs")
    throw std::runtime_error("unknown reference '" + name + "' (available: three-discs)");
  write_png(out_file, three_discs(width, height));
  std::printf("wrote %s (%dx%d)\n", out_file.c_str(), width, height);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flamegrad: differentiable fractal flame rendering and fitting"};
  app.require_subcommand(1);

  // train
  std::string train_config, train_out = "out";
  bool train_force = false, train_det = false;
  int train_threads = 0;
  std::int64_t train_seed = -1;
  int train_iters = -1;
  auto* train_cmd = app.add_subcommand("train", "fit flame parameters to a reference image");
  train_cmd->add_option("config", train_config, "scene config JSON")->required();
  train_cmd->add_option("--out", train_out, "output directory (params.json, loss.csv, preview.png)");
  train_cmd->add_option("--seed", train_seed, "override the training seed");
  train_cmd->add_option("--iterations", train_iters, "override the iteration count");
  train_cmd->add_option("--threads", train_threads, "worker threads (0 = all cores)");
  train_cmd->add_flag("--deterministic", train_det, "single-threaded, bit-reproducible run");
  train_cmd->add_flag("--force", train_force, "overwrite existing outputs");

  // render
  std::string render_params, render_out = "render.png";
  bool render_force = false;
  int render_width = 512, render_height = 512, render_steps = 64, render_warmup = 20;
  std::int64_t render_samples = 4'000'000;
  std::uint64_t render_seed = 0;
  int render_threads = 0;
  auto* render_cmd = app.add_subcommand("render", "render a parameter file to a PNG");
  render_cmd->add_option("params", render_params, "params.json produced by train")->required();
  render_cmd->add_option("--out", render_out, "output PNG path");
  render_cmd->add_option("--width", render_width, "image width")->check(CLI::PositiveNumber);
  render_cmd->add_option("--height", render_height, "image height")->check(CLI::PositiveNumber);
  render_cmd->add_option("--samples", render_samples, "samples per flame")->check(CLI::PositiveNumber);
  render_cmd->add_option("--steps", render_steps, "chain length per batch")->check(CLI::PositiveNumber);
  render_cmd->add_option("--warmup", render_warmup, "warmup steps per chain")->check(CLI::NonNegativeNumber);
  render_cmd->add_option("--seed", render_seed, "sampling seed");
  render_cmd->add_option("--threads", render_threads, "worker threads (0 = all cores)");
  render_cmd->add_flag("--force", render_force, "overwrite an existing output");

  // gradcheck
  std::string check_config;
  double check_tol = 0.0, check_fd = 1e-4;
  int check_threads = 0;
  auto* check_cmd =
      app.add_subcommand("gradcheck", "compare analytic gradients with finite differences");
  check_cmd->add_option("config", check_config, "scene config JSON")->required();
  check_cmd->add_option("--tolerance", check_tol,
                        "max relative error (default 1e-3 linear / 1e-2 otherwise)");
  check_cmd->add_option("--fd-step", check_fd, "central difference step")->check(CLI::PositiveNumber);
  check_cmd->add_option("--threads", check_threads, "worker threads (0 = all cores)");

  // make-reference
  std::string ref_name, ref_out = "reference.png";
  bool ref_force = false;
  int ref_width = 100, ref_height = 100;
  auto* ref_cmd = app.add_subcommand("make-reference", "write a builtin reference image");
  ref_cmd->add_option("name", ref_name, "builtin name (three-discs)")->required();
  ref_cmd->add_option("--out", ref_out, "output PNG path");
  ref_cmd->add_option("--width", ref_width, "image width")->check(CLI::PositiveNumber);
  ref_cmd->add_option("--height", ref_height, "image height")->check(CLI::PositiveNumber);
  ref_cmd->add_flag("--force", ref_force, "overwrite an existing output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed())
      return run_train(train_config, train_out, train_force, train_det, train_threads,
                       train_seed, train_iters);
    if (render_cmd->parsed())
      return run_render(render_params, render_out, render_force, render_width,
                        render_height, render_samples, render_seed, render_steps,
                        render_warmup, render_threads);
    if (check_cmd->parsed()) return run_gradcheck(check_config, check_tol, check_fd, check_threads);
    if (ref_cmd->parsed())
      return run_make_reference(ref_name, ref_out, ref_force, ref_width, ref_height);
  } catch (const ExitWith& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return e.code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return 0;
}
