#include "common.hpp"

#include <set>

#include "flamegrad/serialize.hpp"
#include "flamegrad/variations.hpp"

using namespace flamegrad;
using testutil::rel_error;

TEST_SUITE("types") {
  TEST_CASE("affine map evaluates x' = ax + by + c") {
    const AffineMap m = AffineMap::from_coeffs({0.5, 0.0, 1.0, 0.0, 0.5, 0.0});
    const Vec2 out = m(Vec2(0.0, 0.0));
    CHECK(out.x() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(out.y() == doctest::Approx(0.0).epsilon(1e-15));

    const AffineMap g = AffineMap::from_coeffs({1.0, 2.0, 3.0, 4.0, 5.0, 6.0});
    const Vec2 p(0.7, -0.3);
    const Vec2 expect(1.0 * 0.7 + 2.0 * -0.3 + 3.0, 4.0 * 0.7 + 5.0 * -0.3 + 6.0);
    CHECK((g(p) - expect).norm() == doctest::Approx(0.0).epsilon(1e-15));
  }

  TEST_CASE("coeffs round-trips in a..f order") {
    const std::array<double, 6> c = {0.1, -0.2, 0.3, -0.4, 0.5, -0.6};
    const AffineMap m = AffineMap::from_coeffs(c);
    CHECK(m.coeffs() == c);
    CHECK(m.linear(0, 0) == 0.1);
    CHECK(m.linear(0, 1) == -0.2);
    CHECK(m.translation.x() == 0.3);
    CHECK(m.linear(1, 0) == -0.4);
    CHECK(m.linear(1, 1) == 0.5);
    CHECK(m.translation.y() == -0.6);
  }

  TEST_CASE("identity map is a no-op") {
    const Vec2 p(0.3, -1.7);
    CHECK((AffineMap::identity()(p) - p).norm() == 0.0);
  }

  TEST_CASE("softplus and its inverse") {
    CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(softplus(30.0) == doctest::Approx(30.0).epsilon(1e-12));
    CHECK(softplus(-30.0) == doctest::Approx(std::exp(-30.0)).epsilon(1e-9));
    for (double x : {-5.0, -1.0, 0.0, 2.5, 20.0, 40.0})
      CHECK(inverse_softplus(softplus(x)) == doctest::Approx(x).epsilon(1e-9));
    // Monotone increasing.
    CHECK(softplus(1.0) > softplus(0.5));
  }

  TEST_CASE("sigmoid is the derivative of softplus") {
    CHECK(sigmoid(0.0) == 0.5);
    for (double x : {-3.0, -0.7, 0.0, 1.2, 4.0}) {
      const double h = 1e-6;
      const double fd = (softplus(x + h) - softplus(x - h)) / (2.0 * h);
      CHECK(rel_error(sigmoid(x), fd) < 1e-8);
    }
  }

  TEST_CASE("effective beta stays above 1 and hits pinned values") {
    CHECK(effective_beta(0.0) == doctest::Approx(1.0 + std::log(2.0)).epsilon(1e-15));
    CHECK(effective_beta(inverse_softplus(1.0)) == doctest::Approx(2.0).epsilon(1e-12));
    // softplus(raw) underflows below roughly raw = -36; beta then saturates at
    // exactly 1 instead of dipping under it.
    for (double raw : {-30.0, -5.0, 0.0, 3.0, 50.0}) CHECK(effective_beta(raw) > 1.0);
    CHECK(effective_beta(-40.0) >= 1.0);
  }
}

TEST_SUITE("rng") {
  TEST_CASE("streams are deterministic per seed") {
    auto a = make_rng(42), b = make_rng(42), c = make_rng(43);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 16; ++i) {
      const auto va = a(), vb = b(), vc = c();
      all_equal = all_equal && (va == vb);
      any_diff = any_diff || (va != vc);
    }
    CHECK(all_equal);
    CHECK(any_diff);
  }

  TEST_CASE("mix_seed separates streams") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t a : {0ull, 1ull, 42ull})
      for (std::uint64_t b : {0ull, 1ull, 2ull, 1000000ull}) seen.insert(mix_seed(a, b));
    CHECK(seen.size() == 12);  // no collisions among small inputs
  }

  TEST_CASE("unit_real covers [0, 1)") {
    auto rng = make_rng(7);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const double u = unit_real(rng);
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
      lo = std::min(lo, u);
      hi = std::max(hi, u);
      sum += u;
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
  }

  TEST_CASE("uniform_index is unbiased across buckets") {
    auto rng = make_rng(11);
    int counts[5] = {0, 0, 0, 0, 0};
    const int n = 500000;
    for (int i = 0; i < n; ++i) ++counts[uniform_index(rng, 5)];
    for (int k = 0; k < 5; ++k)
      CHECK(std::abs(counts[k] / static_cast<double>(n) - 0.2) < 0.004);
  }

  TEST_CASE("normal has the right first two moments") {
    auto rng = make_rng(5);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = normal(rng);
      sum += x;
      sum2 += x * x;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean) < 0.01);
    CHECK(sum2 / n - mean * mean == doctest::Approx(1.0).epsilon(0.02));
  }

  TEST_CASE("uniform_real maps into the requested interval") {
    auto rng = make_rng(3);
    for (int i = 0; i < 1000; ++i) {
      const double u = uniform_real(rng, -1.0, 1.0);
      CHECK(u >= -1.0);
      CHECK(u < 1.0);
    }
  }
}

TEST_SUITE("variations") {
  TEST_CASE("names round-trip and unknown names are rejected") {
    for (int i = 0; i < kVariationCount; ++i) {
      const auto v = static_cast<Variation>(i);
      const auto back = variation_from_name(variation_name(v));
      REQUIRE(back.has_value());
      CHECK(*back == v);
    }
    CHECK(!variation_from_name("swirl").has_value());
    CHECK(!variation_from_name("Linear").has_value());  // names are lowercase
  }

  TEST_CASE("linear is the identity") {
    const Vec2 p(0.37, -1.21);
    CHECK((apply_variation(Variation::Linear, p) - p).norm() == 0.0);
    CHECK((variation_jacobian(Variation::Linear, p) - Mat2::Identity()).norm() == 0.0);
  }

  TEST_CASE("spherical at (2, 0)") {
    const Vec2 out = apply_variation(Variation::Spherical, Vec2(2.0, 0.0));
    CHECK(out.x() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(out.y() == doctest::Approx(0.0).epsilon(1e-14));
    const Mat2 J = variation_jacobian(Variation::Spherical, Vec2(2.0, 0.0));
    CHECK(J(0, 0) == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(J(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(J(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(J(1, 1) == doctest::Approx(0.25).epsilon(1e-12));
  }

  TEST_CASE("nonlinear formulas match their closed forms") {
    // theta puts x in the first atan2 slot.
    const Vec2 p(0.6, -0.8);
    const double r = std::hypot(p.x(), p.y());
    const double th = std::atan2(p.x(), p.y());

    const Vec2 hk = apply_variation(Variation::Handkerchief, p);
    CHECK(hk.x() == doctest::Approx(r * std::sin(th + r)).epsilon(1e-14));
    CHECK(hk.y() == doctest::Approx(r * std::cos(th - r)).epsilon(1e-14));

    const Vec2 ex = apply_variation(Variation::Exponential, p);
    const double f = std::exp(p.x() - 1.0);
    CHECK(ex.x() == doctest::Approx(f * std::cos(M_PI * p.y())).epsilon(1e-14));
    CHECK(ex.y() == doctest::Approx(f * std::sin(M_PI * p.y())).epsilon(1e-14));

    const Vec2 dk = apply_variation(Variation::Disk, p);
    CHECK(dk.x() == doctest::Approx(th / M_PI * std::sin(M_PI * r)).epsilon(1e-14));
    CHECK(dk.y() == doctest::Approx(th / M_PI * std::cos(M_PI * r)).epsilon(1e-14));

    const Vec2 ht = apply_variation(Variation::Heart, p);
    CHECK(ht.x() == doctest::Approx(r * std::sin(th * r)).epsilon(1e-14));
    CHECK(ht.y() == doctest::Approx(-r * std::cos(th * r)).epsilon(1e-14));

    const Vec2 pw = apply_variation(Variation::Power, p);
    const double rp = std::pow(r, std::sin(th));
    CHECK(pw.x() == doctest::Approx(rp * std::cos(th)).epsilon(1e-14));
    CHECK(pw.y() == doctest::Approx(rp * std::sin(th)).epsilon(1e-14));
  }

  TEST_CASE("jacobians match central finite differences") {
    auto rng = make_rng(2024);
    const double h = 1e-6;
    for (int vi = 0; vi < kVariationCount; ++vi) {
      const auto v = static_cast<Variation>(vi);
      int tested = 0;
      while (tested < 100) {
        const Vec2 p(uniform_real(rng, -2.0, 2.0), uniform_real(rng, -2.0, 2.0));
        const double r = p.norm();
        if (r < 0.05) continue;                        // singularity guards
        if (std::abs(p.x()) < 0.05 && p.y() < 0.0) continue;  // atan2 branch cut
        ++tested;
        const Mat2 J = variation_jacobian(v, p);
        Mat2 Jfd;
        for (int c = 0; c < 2; ++c) {
          Vec2 pp = p, pm = p;
          pp[c] += h;
          pm[c] -= h;
          const Vec2 d = (apply_variation(v, pp) - apply_variation(v, pm)) / (2.0 * h);
          Jfd(0, c) = d.x();
          Jfd(1, c) = d.y();
        }
        const double err =
            (J - Jfd).cwiseAbs().maxCoeff() / std::max(J.cwiseAbs().maxCoeff(), 1e-8);
        CHECK_MESSAGE(err < 1e-5, variation_name(v), " at (", p.x(), ", ", p.y(), ")");
      }
    }
  }

  TEST_CASE("guards keep tiny radii finite") {
    const Vec2 p(1e-9, 0.0);
    const Vec2 sp = apply_variation(Variation::Spherical, p);
    CHECK(std::isfinite(sp.x()));
    CHECK(sp.x() == doctest::Approx(1e-9 / kGuardEps).epsilon(1e-12));
    for (int vi = 0; vi < kVariationCount; ++vi) {
      const Vec2 out = apply_variation(static_cast<Variation>(vi), Vec2(0.0, 0.0));
      CHECK(std::isfinite(out.x()));
      CHECK(std::isfinite(out.y()));
    }
  }

  TEST_CASE("apply_generator composes affine then variation and flags divergence") {
    GeneratorParams g;
    g.affine = AffineMap::from_coeffs({0.5, 0.0, 1.0, 0.0, 0.5, 0.0});
    g.variation = Variation::Linear;
    const GeneratorResult res = apply_generator(g, Vec2(0.0, 0.0));
    CHECK(!res.divergent);
    CHECK(res.point.x() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(res.point.y() == doctest::Approx(0.0).epsilon(1e-15));

    GeneratorParams big;
    big.affine = AffineMap::identity();
    big.variation = Variation::Exponential;
    CHECK(apply_generator(big, Vec2(1e4, 0.0)).divergent);

    GeneratorParams huge;
    huge.affine = AffineMap::from_coeffs({1e7, 0.0, 0.0, 0.0, 1e7, 0.0});
    huge.variation = Variation::Linear;
    CHECK(apply_generator(huge, Vec2(0.5, 0.5)).divergent);
  }

  TEST_CASE("generator_backward pinned linear case") {
    GeneratorParams g;
    g.affine = AffineMap::identity();
    g.variation = Variation::Linear;
    const Vec2 p(0.4, -0.9);
    const GeneratorBackward gb = generator_backward(g, p, Vec2(1.0, 0.0));
    CHECK((gb.adjoint_in - Vec2(1.0, 0.0)).norm() == doctest::Approx(0.0).epsilon(1e-15));
    AffineGrad expect;
    expect << p.x(), p.y(), 1.0, 0.0, 0.0, 0.0;
    CHECK((gb.affine_grad - expect).norm() == doctest::Approx(0.0).epsilon(1e-15));
  }

  TEST_CASE("generator_backward is linear in the adjoint and zero at zero") {
    GeneratorParams g;
    g.affine = AffineMap::from_coeffs({0.4, 0.1, -0.2, -0.3, 0.5, 0.6});
    g.variation = Variation::Heart;
    const Vec2 p(0.8, 0.5);
    const GeneratorBackward z = generator_backward(g, p, Vec2::Zero());
    CHECK(z.adjoint_in.norm() == 0.0);
    CHECK(z.affine_grad.norm() == 0.0);

    const Vec2 a(0.3, -0.7);
    const GeneratorBackward g1 = generator_backward(g, p, a);
    const GeneratorBackward g2 = generator_backward(g, p, 2.0 * a);
    CHECK((g2.adjoint_in - 2.0 * g1.adjoint_in).norm() < 1e-14);
    CHECK((g2.affine_grad - 2.0 * g1.affine_grad).norm() < 1e-14);
  }

  TEST_CASE("generator_backward matches finite differences") {
    auto rng = make_rng(99);
    const double h = 1e-6;
    for (int vi = 0; vi < kVariationCount; ++vi) {
      for (int rep = 0; rep < 20; ++rep) {
        GeneratorParams g;
        g.variation = static_cast<Variation>(vi);
        std::array<double, 6> c;
        for (double& x : c) x = uniform_real(rng, -0.6, 0.6);
        c[0] += 0.5;  // keep the map reasonably conditioned
        c[4] += 0.5;
        g.affine = AffineMap::from_coeffs(c);
        const Vec2 p(uniform_real(rng, -1.5, 1.5), uniform_real(rng, -1.5, 1.5));
        const Vec2 mid = g.affine(p);
        if (mid.norm() < 0.1) continue;  // stay clear of variation guards
        if (std::abs(mid.x()) < 0.05 && mid.y() < 0.0) continue;
        const Vec2 adj(uniform_real(rng, -1.0, 1.0), uniform_real(rng, -1.0, 1.0));
        const auto value = [&](const GeneratorParams& gg, const Vec2& pp) {
          return adj.dot(apply_generator(gg, pp).point);
        };
        const GeneratorBackward gb = generator_backward(g, p, adj);

        for (int i = 0; i < 6; ++i) {
          auto cp = c, cm = c;
          cp[i] += h;
          cm[i] -= h;
          GeneratorParams gp = g, gm = g;
          gp.affine = AffineMap::from_coeffs(cp);
          gm.affine = AffineMap::from_coeffs(cm);
          const double fd = (value(gp, p) - value(gm, p)) / (2.0 * h);
          CHECK_MESSAGE((rel_error(gb.affine_grad[i], fd) < 1e-5 ||
                             std::abs(gb.affine_grad[i] - fd) < 1e-7),
                        variation_name(g.variation), " coeff ", i);
        }
        for (int cidx = 0; cidx < 2; ++cidx) {
          Vec2 pp = p, pm = p;
          pp[cidx] += h;
          pm[cidx] -= h;
          const double fd = (value(g, pp) - value(g, pm)) / (2.0 * h);
          CHECK_MESSAGE((rel_error(gb.adjoint_in[cidx], fd) < 1e-5 ||
                             std::abs(gb.adjoint_in[cidx] - fd) < 1e-7),
                        variation_name(g.variation), " input ", cidx);
        }
      }
    }
  }
}

TEST_SUITE("params") {
  TEST_CASE("init_random is deterministic and respects the spec") {
    SceneSpec spec;
    spec.flames.push_back({4, Variation::Linear});
    spec.flames.push_back({3, Variation::Spherical});
    const SceneParams a = init_random(7, spec);
    const SceneParams b = init_random(7, spec);
    const SceneParams c = init_random(8, spec);

    CHECK(testutil::same_values(flatten(a), flatten(b)));
    CHECK(!testutil::same_values(flatten(a), flatten(c)));
    REQUIRE(a.flame_count() == 2);
    CHECK(a.flames[0].generator_count() == 4);
    CHECK(a.flames[1].generator_count() == 3);
    CHECK(a.flames[1].generators[0].variation == Variation::Spherical);
    for (const auto& flame : a.flames) {
      CHECK(effective_beta(flame) == doctest::Approx(2.0).epsilon(1e-12));
      CHECK((flame.final_transform.linear - Mat2::Identity()).norm() == 0.0);
      CHECK(flame.final_transform.translation.norm() == 0.0);
      CHECK(flame.colors.minCoeff() >= 0.0);
      CHECK(flame.colors.maxCoeff() <= 1.0);
      for (const auto& g : flame.generators) {
        CHECK((g.affine.linear - Mat2::Identity()).cwiseAbs().maxCoeff() <= 0.5);
        CHECK(g.affine.translation.cwiseAbs().maxCoeff() <= 1.0);
      }
    }
    CHECK(testutil::same_values(a.background, Vec3::Ones()));
    CHECK(!a.background_learnable);
  }

  TEST_CASE("init_random draws a learnable background") {
    SceneSpec spec;
    spec.flames.push_back({2, Variation::Linear});
    spec.background_learnable = true;
    const SceneParams p = init_random(3, spec);
    CHECK(p.background_learnable);
    CHECK(p.background.minCoeff() >= 0.0);
    CHECK(p.background.maxCoeff() <= 1.0);
    CHECK(!testutil::same_values(p.background, Vec3::Ones()));
  }

  TEST_CASE("init_random rejects degenerate specs") {
    SceneSpec empty;
    CHECK_THROWS_AS(init_random(1, empty), std::invalid_argument);
    SceneSpec one;
    one.flames.push_back({1, Variation::Linear});
    CHECK_THROWS_AS(init_random(1, one), std::invalid_argument);
  }

  TEST_CASE("flatten/unflatten round-trips exactly") {
    SceneSpec spec;
    spec.flames.push_back({4, Variation::Linear});
    spec.flames.push_back({2, Variation::Disk});
    spec.background_learnable = true;
    SceneParams p = init_random(19, spec);
    p.flames[0].beta_raw = -0.37;

    const VecX v = flatten(p);
    CHECK(v.size() == flat_size(p));
    CHECK(v.size() == 4 * 10 + 7 + 2 * 10 + 7 + 3);

    SceneParams q = init_random(5, spec);  // different values, same shape
    unflatten(v, q);
    CHECK(testutil::same_values(flatten(q), v));
    CHECK(q.flames[0].beta_raw == p.flames[0].beta_raw);
    CHECK(q.flames[1].generators[1].affine.coeffs() ==
          p.flames[1].generators[1].affine.coeffs());
  }

  TEST_CASE("gradient flattening shares the parameter layout") {
    SceneSpec spec;
    spec.flames.push_back({3, Variation::Linear});
    const SceneParams p = init_random(2, spec);
    GradientSet g = GradientSet::zeros_like(p);
    CHECK(flatten(g).size() == flat_size(p));
    CHECK(flatten(g).norm() == 0.0);
    g.flames[0].affine(2, 5) = 1.0;  // generator 2, coeff f
    const VecX v = flatten(g);
    CHECK(v[2 * 6 + 5] == 1.0);
    CHECK(v.cwiseAbs().sum() == 1.0);
  }

  TEST_CASE("group_of and parameter_path label the flat layout") {
    SceneSpec spec;
    spec.flames.push_back({4, Variation::Linear});
    const SceneParams p = init_random(1, spec);
    // Per flame: 24 affine, 1 beta, 6 final, 16 colors, then 3 background.
    CHECK(group_of(p, 0) == ParamGroup::Affine);
    CHECK(group_of(p, 23) == ParamGroup::Affine);
    CHECK(group_of(p, 24) == ParamGroup::BetaRaw);
    CHECK(group_of(p, 25) == ParamGroup::FinalTransform);
    CHECK(group_of(p, 30) == ParamGroup::FinalTransform);
    CHECK(group_of(p, 31) == ParamGroup::Colors);
    CHECK(group_of(p, 46) == ParamGroup::Colors);
    CHECK(group_of(p, 47) == ParamGroup::Background);
    CHECK(group_of(p, 49) == ParamGroup::Background);

    CHECK(parameter_path(p, 0) == "flames[0].generators[0].affine.a");
    CHECK(parameter_path(p, 13) == "flames[0].generators[2].affine.b");
    CHECK(parameter_path(p, 24) == "flames[0].beta_raw");
    CHECK(parameter_path(p, 26) == "flames[0].final_transform.b");
    CHECK(parameter_path(p, 31) == "flames[0].colors[0].r");
    CHECK(parameter_path(p, 46) == "flames[0].colors[3].a");
    CHECK(parameter_path(p, 47) == "background.r");
    CHECK(parameter_path(p, 49) == "background.b");
  }

  TEST_CASE("project_constraints clamps colors and background only") {
    SceneSpec spec;
    spec.flames.push_back({2, Variation::Linear});
    SceneParams p = init_random(4, spec);
    p.flames[0].colors(0, 0) = -0.5;
    p.flames[0].colors(1, 3) = 1.5;
    p.background = Vec3(-1.0, 0.5, 2.0);
    p.flames[0].generators[0].affine.translation.x() = 7.0;  // must stay
    p.flames[0].beta_raw = -11.0;                            // must stay

    project_constraints(p);
    CHECK(p.flames[0].colors(0, 0) == 0.0);
    CHECK(p.flames[0].colors(1, 3) == 1.0);
    CHECK(testutil::same_values(p.background, Vec3(0.0, 0.5, 1.0)));
    CHECK(p.flames[0].generators[0].affine.translation.x() == 7.0);
    CHECK(p.flames[0].beta_raw == -11.0);

    const VecX before = flatten(p);
    project_constraints(p);
    CHECK(testutil::same_values(flatten(p), before));  // idempotent
  }
}

TEST_SUITE("serialize") {
  TEST_CASE("round-trip preserves every field exactly") {
    SceneSpec spec;
    spec.flames.push_back({4, Variation::Heart});
    spec.flames.push_back({2, Variation::Linear});
    spec.background_learnable = true;
    SceneParams p = init_random(123, spec);
    p.flames[0].beta_raw = 1.2345678901234567;
    p.flames[0].final_transform = AffineMap::from_coeffs({0.9, -0.1, 0.05, 0.1, 0.8, -0.2});

    const SceneParams q = deserialize(serialize(p));
    CHECK(testutil::same_values(flatten(q), flatten(p)));
    CHECK(q.background_learnable == p.background_learnable);
    REQUIRE(q.flame_count() == 2);
    CHECK(q.flames[0].generators[3].variation == Variation::Heart);
    CHECK(q.flames[1].generators[0].variation == Variation::Linear);
  }

  TEST_CASE("rejects malformed documents with field paths") {
    SceneSpec spec;
    spec.flames.push_back({2, Variation::Linear});
    const std::string good = serialize(init_random(1, spec));

    const auto expect_error = [&](const std::string& doc, const std::string& needle) {
      try {
        deserialize(doc);
        FAIL_CHECK("expected SchemaError for ", needle);
      } catch (const SchemaError& e) {
        CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos,
                      "message was: ", std::string(e.what()));
      }
    };

    expect_error("{", "invalid JSON");
    expect_error("[]", "expected an object");
    const auto patch = [&](const std::string& from, const std::string& to) {
      std::string s = good;
      const auto pos = s.find(from);
      REQUIRE(pos != std::string::npos);
      s.replace(pos, from.size(), to);
      return s;
    };
    expect_error(patch("flamegrad-v1", "flamegrad-v0"), "version");
    expect_error(patch("\"variation\": \"linear\"", "\"variation\": \"vortex\""), "vortex");
    expect_error(patch("\"background\": [", "\"background\": [9,"), "background");
  }

  TEST_CASE("serialize refuses non-finite values") {
    SceneSpec spec;
    spec.flames.push_back({2, Variation::Linear});
    SceneParams p = init_random(1, spec);
    p.flames[0].beta_raw = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(serialize(p), std::invalid_argument);
  }

  TEST_CASE("output ends with a newline and parses as JSON") {
    SceneSpec spec;
    spec.flames.push_back({2, Variation::Linear});
    const std::string doc = serialize(init_random(6, spec));
    REQUIRE(!doc.empty());
    CHECK(doc.back() == '\n');
    CHECK(doc.find("\"version\": \"flamegrad-v1\"") != std::string::npos);
  }
}
