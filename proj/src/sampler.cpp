#include "flamegrad/sampler.hpp"

#include "flamegrad/parallel.hpp"
#include "flamegrad/rng.hpp"

#include <stdexcept>

namespace flamegrad {

namespace {

// Distinct stream salts so an order seed and an init seed never collide even
// if the caller passes equal values.
constexpr std::uint64_t kOrderStream = 0x6f72646572ULL;
constexpr std::uint64_t kInitStream = 0x696e6974ULL;

std::mt19937_64 order_row_rng(std::uint64_t seed, long long row) {
  return make_rng(mix_seed(mix_seed(seed, kOrderStream), static_cast<std::uint64_t>(row)));
}

std::mt19937_64 chain_rng(std::uint64_t seed, long long chain) {
  return make_rng(mix_seed(mix_seed(seed, kInitStream), static_cast<std::uint64_t>(chain)));
}

}  // namespace

GeneratorOrder draw_generator_order(std::uint64_t seed, int n_generators, int chains,
                                    int steps) {
  if (n_generators < 2)
    throw std::invalid_argument("draw_generator_order: need at least 2 generators");
  if (chains < 1 || steps < 1)
    throw std::invalid_argument("draw_generator_order: chains and steps must be positive");
  GeneratorOrder order;
  order.seed = seed;
  order.n_generators = n_generators;
  order.indices.resize(chains, steps);
  for (int b = 0; b < chains; ++b) {
    auto rng = order_row_rng(seed, b);
    for (int t = 0; t < steps; ++t)
      order.indices(b, t) =
          static_cast<std::int32_t>(uniform_index(rng, static_cast<std::uint32_t>(n_generators)));
  }
  return order;
}

SampleBatch run_chaos_game(const FlameParams& flame, const GeneratorOrder& order,
                           int warmup, std::uint64_t init_seed, bool record_replay,
                           int threads) {
  const int nf = flame.generator_count();
  if (nf < 2) throw std::invalid_argument("run_chaos_game: flame needs >= 2 generators");
  if (order.n_generators != nf)
    throw std::invalid_argument("run_chaos_game: order drawn for a different generator count");
  if (warmup < 0) throw std::invalid_argument("run_chaos_game: warmup must be >= 0");

  const int B = order.chains(), T = order.steps();
  const int total = warmup + T;
  const double inv_beta = 1.0 / effective_beta(flame);

  SampleBatch batch;
  batch.chains = B;
  batch.steps = T;
  batch.warmup = warmup;
  batch.n_generators = nf;
  batch.positions.resize(static_cast<Eigen::Index>(B) * T, 2);
  batch.qualities.resize(static_cast<Eigen::Index>(B) * T, nf);
  batch.alive.assign(static_cast<size_t>(B) * T, 0);
  batch.has_replay = record_replay;
  if (record_replay) {
    batch.replay.states.resize(static_cast<Eigen::Index>(B) * (total + 1), 2);
    batch.replay.gens.assign(static_cast<size_t>(B) * total, 0);
    batch.replay.alive.assign(static_cast<size_t>(B) * total, 0);
  }

  std::vector<std::int64_t> dead_per_chunk(resolve_threads(threads), 0);

  parallel_chunks(B, threads, [&](long long begin, long long end, int chunk) {
    VecX q(nf);
    std::int64_t dead = 0;
    for (long long b = begin; b < end; ++b) {
      auto rng = chain_rng(init_seed, b);
      Vec2 state(uniform_real(rng, -1.0, 1.0), uniform_real(rng, -1.0, 1.0));
      q.setZero();
      const long long replay_base = b * (total + 1);
      if (record_replay) batch.replay.states.row(replay_base) = state.transpose();
      for (int k = 0; k < total; ++k) {
        const int g = k < warmup
                          ? static_cast<int>(uniform_index(rng, static_cast<std::uint32_t>(nf)))
                          : order.indices(b, k - warmup);
        const GeneratorResult res = apply_generator(flame.generators[g], state);
        bool ok = !res.divergent;
        if (ok) {
          state = res.point;
          q *= inv_beta;
          q(g) += 1.0;
        } else {
          state << uniform_real(rng, -1.0, 1.0), uniform_real(rng, -1.0, 1.0);
          q.setZero();
        }
        if (record_replay) {
          batch.replay.states.row(replay_base + k + 1) = state.transpose();
          batch.replay.gens[b * total + k] = static_cast<std::int32_t>(g);
          batch.replay.alive[b * total + k] = ok ? 1 : 0;
        }
        if (k >= warmup) {
          const long long row = b * T + (k - warmup);
          batch.positions.row(row) = state.transpose();
          batch.qualities.row(row) = q.transpose();
          batch.alive[row] = ok ? 1 : 0;
          if (!ok) ++dead;
        }
      }
    }
    dead_per_chunk[chunk] += dead;
  });

  for (std::int64_t d : dead_per_chunk) batch.dead_emitted += d;
  return batch;
}

ChaosGradients chaos_game_backward(const SampleBatch& batch, const FlameParams& flame,
                                   const MatX2& adjoint_positions,
                                   const MatX& adjoint_qualities, int threads) {
  if (!batch.has_replay)
    throw std::invalid_argument("chaos_game_backward: batch was run without replay");
  const int nf = flame.generator_count();
  const int B = batch.chains, T = batch.steps, W = batch.warmup;
  const int total = W + T;
  const double beta = effective_beta(flame);
  const double inv_beta = 1.0 / beta;

  const int workers = resolve_threads(threads);
  std::vector<MatX> affine_parts(workers, MatX::Zero(nf, 6));
  std::vector<double> beta_parts(workers, 0.0);

  parallel_chunks(B, threads, [&](long long begin, long long end, int chunk) {
    MatX& affine = affine_parts[chunk];
    double beta_grad = 0.0;  // w.r.t. effective beta
    MatX qh(total + 1, nf);  // quality before each step, rebuilt per chain
    VecX aq(nf);
    for (long long b = begin; b < end; ++b) {
      const long long replay_base = b * (total + 1);
      const long long step_base = b * total;

      qh.row(0).setZero();
      for (int k = 0; k < total; ++k) {
        if (batch.replay.alive[step_base + k]) {
          qh.row(k + 1) = qh.row(k) * inv_beta;
          qh(k + 1, batch.replay.gens[step_base + k]) += 1.0;
        } else {
          qh.row(k + 1).setZero();
        }
      }

      aq.setZero();
      Vec2 apos = Vec2::Zero();
      for (int k = total - 1; k >= 0; --k) {
        if (k >= W) {
          const long long row = b * T + (k - W);
          aq += adjoint_qualities.row(row).transpose();
          apos += adjoint_positions.row(row).transpose();
        }
        if (batch.replay.alive[step_base + k]) {
          // q_k = beta^-1 q_{k-1} + e_g: direct beta term, then pass back.
          beta_grad -= inv_beta * inv_beta * aq.dot(qh.row(k).transpose());
          aq *= inv_beta;
          const int g = batch.replay.gens[step_base + k];
          const Vec2 input = batch.replay.states.row(replay_base + k).transpose();
          const GeneratorBackward gb =
              generator_backward(flame.generators[g], input, apos);
          affine.row(g) += gb.affine_grad.transpose();
          apos = gb.adjoint_in;
        } else {
          // Restart: the fresh point and zeroed quality are constants.
          aq.setZero();
          apos.setZero();
        }
      }
    }
    beta_parts[chunk] += beta_grad;
  });

  ChaosGradients out;
  out.affine = MatX::Zero(nf, 6);
  double beta_grad = 0.0;
  for (int w = 0; w < workers; ++w) {
    out.affine += affine_parts[w];
    beta_grad += beta_parts[w];
  }
  out.beta_raw = beta_grad * sigmoid(flame.beta_raw);
  return out;
}

}  // namespace flamegrad
