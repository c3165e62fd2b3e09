#pragma once

#include "flamegrad/params.hpp"

#include <cstdint>
#include <vector>

namespace flamegrad {

/// Pre-drawn generator choices, one row per chain. Drawn i.i.d. uniform over
/// [0, n_generators); a deterministic function of (seed, shape). Treated as a
/// constant during backprop (reparameterized sampling).
struct GeneratorOrder {
  Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> indices;
  std::uint64_t seed = 0;
  int n_generators = 0;

  int chains() const { return static_cast<int>(indices.rows()); }
  int steps() const { return static_cast<int>(indices.cols()); }
};

GeneratorOrder draw_generator_order(std::uint64_t seed, int n_generators, int chains,
                                    int steps);

/// Everything the adjoint sweep needs: the state before every step (chain
/// start included), the generator applied at every step, and which steps
/// survived. Indexing per chain covers warmup + steps entries.
struct ChainReplay {
  MatX2 states;                      // (B * (warmup+T+1)) x 2
  std::vector<std::int32_t> gens;    // B * (warmup+T)
  std::vector<std::uint8_t> alive;   // B * (warmup+T)
};

struct SampleBatch {
  int chains = 0;
  int steps = 0;        // emitted steps per chain (T)
  int warmup = 0;
  int n_generators = 0;

  MatX2 positions;                  // (B*T) x 2, row b*T+t
  MatX qualities;                   // (B*T) x N_F
  std::vector<std::uint8_t> alive;  // B*T; dead samples are skipped downstream
  std::int64_t dead_emitted = 0;    // emitted samples lost to divergence restarts

  bool has_replay = false;
  ChainReplay replay;

  std::int64_t sample_count() const {
    return static_cast<std::int64_t>(chains) * steps;
  }
  double dead_fraction() const {
    return sample_count() == 0 ? 0.0
                               : static_cast<double>(dead_emitted) / sample_count();
  }
};

/// Chaos game over B chains. Each chain starts at a point U([-1,1]^2) drawn
/// from init_seed, applies warmup + T generator steps (warmup choices come
/// from the init stream, the rest from `order`), and emits the last T states.
/// Quality vectors follow q_j = beta^-1 q_{j-1} + e_{g_j} from the chain
/// start. A divergent step restarts the chain at a fresh uniform point with
/// q = 0 and alive = false for that step.
SampleBatch run_chaos_game(const FlameParams& flame, const GeneratorOrder& order,
                           int warmup, std::uint64_t init_seed,
                           bool record_replay = true, int threads = 1);

struct ChaosGradients {
  MatX affine;            // N_F x 6
  double beta_raw = 0.0;  // chained through d(beta)/d(beta_raw)
};

/// Reverse sweep per chain: position adjoints flow through the generator
/// Jacobians back to the chain start, quality adjoints through the decay
/// recurrence; both are cut at divergence restarts (the fresh point and the
/// zeroed quality are constants). Requires a batch recorded with replay.
ChaosGradients chaos_game_backward(const SampleBatch& batch, const FlameParams& flame,
                                   const MatX2& adjoint_positions,
                                   const MatX& adjoint_qualities, int threads = 1);

}  // namespace flamegrad
