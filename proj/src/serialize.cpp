#include "flamegrad/serialize.hpp"

#include <json.hpp>

#include <cmath>

namespace flamegrad {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "flamegrad-v1";

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw SchemaError("schema violation at " + field + ": " + what);
}

double get_finite(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(field, "value is not finite");
  return v;
}

double get_unit(const json& j, const std::string& field) {
  const double v = get_finite(j, field);
  if (v < 0.0 || v > 1.0) fail(field, "value outside [0, 1]");
  return v;
}

AffineMap get_affine(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 6) fail(field, "expected an array of 6 numbers");
  std::array<double, 6> c;
  for (int i = 0; i < 6; ++i) c[i] = get_finite(j[i], field + "[" + std::to_string(i) + "]");
  return AffineMap::from_coeffs(c);
}

json affine_to_json(const AffineMap& m) {
  json a = json::array();
  for (double v : m.coeffs()) a.push_back(v);
  return a;
}

void check_finite_params(const SceneParams& p) {
  bool ok = p.background.allFinite();
  for (const auto& f : p.flames) {
    ok = ok && std::isfinite(f.beta_raw) && f.colors.allFinite();
    ok = ok && f.final_transform.linear.allFinite() && f.final_transform.translation.allFinite();
    for (const auto& g : f.generators)
      ok = ok && g.affine.linear.allFinite() && g.affine.translation.allFinite();
  }
  if (!ok) throw std::invalid_argument("serialize: parameters contain non-finite values");
}

}  // namespace

std::string serialize(const SceneParams& params) {
  check_finite_params(params);
  json doc;
  doc["version"] = kVersion;
  doc["background"] = {params.background(0), params.background(1), params.background(2)};
  doc["background_learnable"] = params.background_learnable;
  json flames = json::array();
  for (const auto& f : params.flames) {
    json jf;
    jf["beta_raw"] = f.beta_raw;
    jf["final_transform"] = affine_to_json(f.final_transform);
    json gens = json::array();
    for (const auto& g : f.generators) {
      json jg;
      jg["variation"] = std::string(variation_name(g.variation));
      jg["affine"] = affine_to_json(g.affine);
      gens.push_back(std::move(jg));
    }
    jf["generators"] = std::move(gens);
    json cols = json::array();
    for (Eigen::Index i = 0; i < f.colors.rows(); ++i)
      cols.push_back({f.colors(i, 0), f.colors(i, 1), f.colors(i, 2), f.colors(i, 3)});
    jf["colors"] = std::move(cols);
    flames.push_back(std::move(jf));
  }
  doc["flames"] = std::move(flames);
  return doc.dump(2) + "\n";
}

SceneParams deserialize(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("$", "expected an object");
  if (!doc.contains("version") || !doc["version"].is_string())
    fail("version", "missing or not a string");
  if (doc["version"].get<std::string>() != kVersion)
    fail("version", "expected \"" + std::string(kVersion) + "\", got \"" +
                        doc["version"].get<std::string>() + "\"");

  SceneParams out;
  if (!doc.contains("background") || !doc["background"].is_array() ||
      doc["background"].size() != 3)
    fail("background", "expected an array of 3 numbers");
  for (int i = 0; i < 3; ++i)
    out.background(i) = get_unit(doc["background"][i], "background[" + std::to_string(i) + "]");
  if (!doc.contains("background_learnable") || !doc["background_learnable"].is_boolean())
    fail("background_learnable", "missing or not a boolean");
  out.background_learnable = doc["background_learnable"].get<bool>();

  if (!doc.contains("flames") || !doc["flames"].is_array() || doc["flames"].empty())
    fail("flames", "expected a non-empty array");
  int fi = 0;
  for (const auto& jf : doc["flames"]) {
    const std::string base = "flames[" + std::to_string(fi++) + "]";
    if (!jf.is_object()) fail(base, "expected an object");
    FlameParams f;
    if (!jf.contains("beta_raw")) fail(base + ".beta_raw", "missing");
    f.beta_raw = get_finite(jf["beta_raw"], base + ".beta_raw");
    if (!jf.contains("final_transform")) fail(base + ".final_transform", "missing");
    f.final_transform = get_affine(jf["final_transform"], base + ".final_transform");

    if (!jf.contains("generators") || !jf["generators"].is_array())
      fail(base + ".generators", "expected an array");
    if (jf["generators"].size() < 2)
      fail(base + ".generators", "a flame needs at least 2 generators");
    int gi = 0;
    for (const auto& jg : jf["generators"]) {
      const std::string gbase = base + ".generators[" + std::to_string(gi++) + "]";
      if (!jg.is_object()) fail(gbase, "expected an object");
      GeneratorParams g;
      if (!jg.contains("variation") || !jg["variation"].is_string())
        fail(gbase + ".variation", "missing or not a string");
      const std::string name = jg["variation"].get<std::string>();
      auto v = variation_from_name(name);
      if (!v) fail(gbase + ".variation", "unknown variation tag \"" + name + "\"");
      g.variation = *v;
      if (!jg.contains("affine")) fail(gbase + ".affine", "missing");
      g.affine = get_affine(jg["affine"], gbase + ".affine");
      f.generators.push_back(g);
    }

    if (!jf.contains("colors") || !jf["colors"].is_array() ||
        jf["colors"].size() != jf["generators"].size())
      fail(base + ".colors", "expected one RGBA entry per generator");
    f.colors.resize(static_cast<Eigen::Index>(jf["colors"].size()), 4);
    int ci = 0;
    for (const auto& jc : jf["colors"]) {
      const std::string cbase = base + ".colors[" + std::to_string(ci) + "]";
      if (!jc.is_array() || jc.size() != 4) fail(cbase, "expected an array of 4 numbers");
      for (int ch = 0; ch < 4; ++ch)
        f.colors(ci, ch) = get_unit(jc[ch], cbase + "[" + std::to_string(ch) + "]");
      ++ci;
    }
    out.flames.push_back(std::move(f));
  }
  return out;
}

}  // namespace flamegrad
