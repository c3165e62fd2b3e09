#include "flamegrad/config.hpp"

#include <json.hpp>

#include <fstream>
#include <initializer_list>

#include "flamegrad/image_io.hpp"

namespace flamegrad {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw SchemaError("config error at " + field + ": " + what);
}

void check_keys(const json& j, const std::string& field,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known) fail(field.empty() ? item.key() : field + "." + item.key(), "unknown key");
  }
}

double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(field, "expected a finite number");
  return v;
}

int get_positive_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) fail(field, "expected an integer");
  const std::int64_t v = j.get<std::int64_t>();
  if (v <= 0 || v > (std::int64_t{1} << 31)) fail(field, "expected a positive integer");
  return static_cast<int>(v);
}

int get_nonneg_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) fail(field, "expected an integer");
  const std::int64_t v = j.get<std::int64_t>();
  if (v < 0 || v > (std::int64_t{1} << 31)) fail(field, "expected a non-negative integer");
  return static_cast<int>(v);
}

std::uint64_t get_seed(const json& j, const std::string& field) {
  if (!j.is_number_unsigned() && !j.is_number_integer()) fail(field, "expected an integer seed");
  if (j.is_number_integer() && j.get<std::int64_t>() < 0) fail(field, "seed must be non-negative");
  return j.get<std::uint64_t>();
}

Vec3 get_rgb(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) fail(field, "expected [r, g, b]");
  Vec3 rgb;
  for (int c = 0; c < 3; ++c) {
    rgb[c] = get_number(j[c], field + "[" + std::to_string(c) + "]");
    if (rgb[c] < 0.0 || rgb[c] > 1.0) fail(field, "channel outside [0, 1]");
  }
  return rgb;
}

void parse_reference(const json& j, SceneConfig& config) {
  if (j.is_string()) {
    config.reference_path = j.get<std::string>();
    if (config.reference_path.empty()) fail("reference", "empty path");
    return;
  }
  if (j.is_object()) {
    check_keys(j, "reference", {"builtin"});
    if (!j.contains("builtin") || !j["builtin"].is_string())
      fail("reference.builtin", "expected a string");
    const std::string name = j["builtin"].get<std::string>();
    if (name != "three-discs") fail("reference.builtin", "unknown builtin '" + name + "'");
    config.reference_builtin = name;
    return;
  }
  fail("reference", "expected a path or {\"builtin\": ...}");
}

void parse_flames(const json& j, SceneConfig& config) {
  if (!j.is_array() || j.empty()) fail("flames", "expected a non-empty array");
  for (size_t i = 0; i < j.size(); ++i) {
    const std::string field = "flames[" + std::to_string(i) + "]";
    const json& jf = j[i];
    if (!jf.is_object()) fail(field, "expected an object");
    check_keys(jf, field, {"generators", "variation"});
    FlameSpec spec;
    if (!jf.contains("generators")) fail(field + ".generators", "missing");
    spec.generator_count = get_positive_int(jf["generators"], field + ".generators");
    if (spec.generator_count < 2) fail(field + ".generators", "need at least 2 generators");
    if (jf.contains("variation")) {
      if (!jf["variation"].is_string()) fail(field + ".variation", "expected a string");
      const std::string name = jf["variation"].get<std::string>();
      const auto v = variation_from_name(name);
      if (!v) fail(field + ".variation", "unknown variation '" + name + "'");
      spec.variation = *v;
    }
    config.spec.flames.push_back(spec);
  }
}

void parse_learning_rates(const json& j, LearningRates& rates) {
  check_keys(j, "train.learning_rates",
             {"affine", "final_transform", "colors", "beta_raw", "background"});
  const auto set = [&](const char* key, double& target) {
    if (!j.contains(key)) return;
    const std::string field = std::string("train.learning_rates.") + key;
    target = get_number(j[key], field);
    if (target < 0.0) fail(field, "must be non-negative");
  };
  set("affine", rates.affine);
  set("final_transform", rates.final_transform);
  set("colors", rates.colors);
  set("beta_raw", rates.beta_raw);
  set("background", rates.background);
}

void parse_train(const json& j, SceneConfig& config) {
  if (!j.is_object()) fail("train", "expected an object");
  check_keys(j, "train",
             {"width", "height", "chains", "steps", "warmup", "iterations", "seed",
              "learning_rates", "grad_clip_norm"});
  const auto require = [&](const char* key) -> const json& {
    if (!j.contains(key)) fail(std::string("train.") + key, "missing");
    return j[key];
  };
  config.train.render.width = get_positive_int(require("width"), "train.width");
  config.train.render.height = get_positive_int(require("height"), "train.height");
  config.train.render.chains = get_positive_int(require("chains"), "train.chains");
  config.train.render.steps = get_positive_int(require("steps"), "train.steps");
  if (j.contains("warmup"))
    config.train.render.warmup = get_nonneg_int(j["warmup"], "train.warmup");
  config.train.iterations = get_nonneg_int(require("iterations"), "train.iterations");
  if (j.contains("seed")) config.train.seed = get_seed(j["seed"], "train.seed");
  if (j.contains("grad_clip_norm")) {
    config.train.grad_clip_norm = get_number(j["grad_clip_norm"], "train.grad_clip_norm");
    if (config.train.grad_clip_norm < 0.0) fail("train.grad_clip_norm", "must be non-negative");
  }
  if (j.contains("learning_rates")) {
    if (!j["learning_rates"].is_object()) fail("train.learning_rates", "expected an object");
    parse_learning_rates(j["learning_rates"], config.train.learning_rates);
  }
}

void parse_eval(const json& j, SceneConfig& config) {
  if (!j.is_object()) fail("eval", "expected an object");
  check_keys(j, "eval", {"width", "height", "samples", "steps", "warmup", "seed"});
  if (j.contains("width")) config.eval.width = get_positive_int(j["width"], "eval.width");
  if (j.contains("height")) config.eval.height = get_positive_int(j["height"], "eval.height");
  if (j.contains("samples")) {
    if (!j["samples"].is_number_integer()) fail("eval.samples", "expected an integer");
    config.eval.samples = j["samples"].get<std::int64_t>();
    if (config.eval.samples <= 0) fail("eval.samples", "must be positive");
  }
  if (j.contains("steps")) config.eval.steps = get_positive_int(j["steps"], "eval.steps");
  if (j.contains("warmup")) config.eval.warmup = get_nonneg_int(j["warmup"], "eval.warmup");
  if (j.contains("seed")) config.eval.seed = get_seed(j["seed"], "eval.seed");
}

}  // namespace

SceneConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("(root)", "expected an object");
  check_keys(j, "",
             {"reference", "params", "flames", "init_seed", "background", "train", "eval"});

  SceneConfig config;
  if (!j.contains("reference")) fail("reference", "missing");
  parse_reference(j["reference"], config);

  if (j.contains("params")) {
    if (!j["params"].is_string() || j["params"].get<std::string>().empty())
      fail("params", "expected a file path");
    config.params_path = j["params"].get<std::string>();
  }
  if (j.contains("flames")) parse_flames(j["flames"], config);
  if (config.params_path.empty() && config.spec.flames.empty())
    fail("flames", "need either a flames spec or a params file");
  if (j.contains("init_seed")) config.init_seed = get_seed(j["init_seed"], "init_seed");

  if (j.contains("background")) {
    const json& jb = j["background"];
    if (!jb.is_object()) fail("background", "expected an object");
    check_keys(jb, "background", {"rgb", "learnable"});
    if (jb.contains("rgb")) {
      config.background = get_rgb(jb["rgb"], "background.rgb");
      config.has_background_rgb = true;
    }
    if (jb.contains("learnable")) {
      if (!jb["learnable"].is_boolean()) fail("background.learnable", "expected a boolean");
      config.background_learnable = jb["learnable"].get<bool>();
      config.has_background_learnable = true;
    }
  }
  config.spec.background_learnable = config.background_learnable;

  if (!j.contains("train")) fail("train", "missing");
  parse_train(j["train"], config);

  // Evaluation defaults: the training frame at 20x the per-iteration budget.
  config.eval.width = config.train.render.width;
  config.eval.height = config.train.render.height;
  config.eval.samples = 20 * static_cast<std::int64_t>(config.train.render.chains) *
                        config.train.render.steps;
  config.eval.warmup = config.train.render.warmup;
  config.eval.seed = config.train.seed;
  if (j.contains("eval")) parse_eval(j["eval"], config);
  return config;
}

SceneParams initial_params(const SceneConfig& config) {
  SceneParams params;
  if (!config.params_path.empty()) {
    std::ifstream in(config.params_path);
    if (!in) throw std::runtime_error("cannot open params: " + config.params_path);
    const std::string text((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    params = deserialize(text);
  } else {
    params = init_random(config.init_seed, config.spec);
  }
  // Explicit config settings win over whatever the source provided; an
  // init_random draw for a learnable background is kept unless the config
  // names a color.
  if (config.has_background_rgb) params.background = config.background;
  if (config.has_background_learnable) params.background_learnable = config.background_learnable;
  return params;
}

RgbBuffer load_reference(const SceneConfig& config, int width, int height) {
  if (!config.reference_builtin.empty()) {
    if (config.reference_builtin == "three-discs") return three_discs(width, height);
    throw std::runtime_error("unknown builtin reference: " + config.reference_builtin);
  }
  return resample(read_png(config.reference_path), width, height);
}

}  // namespace flamegrad
