#include "flamegrad/splatter.hpp"

#include "flamegrad/parallel.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace flamegrad {

namespace {

const double kExpNeg2 = std::exp(-2.0);

struct Footprint {
  double ax[3], ay[3];  // separable exp(-2 dx^2) / exp(-2 dy^2) factors
  double dx[3], dy[3];  // signed distances to the three column/row centers
  int cx = 0, cy = 0;
  bool in_image = false;
};

// Pixel-space footprint of one sample. The per-axis factors use
// exp(-2(e +- 1)^2) = exp(-2 e^2) * e^-2 * exp(-+4 e), so a sample sitting
// exactly on a pixel center reproduces the pinned 1 / e^-2 / e^-4 weights.
inline Footprint footprint(const AffineMap& final_transform, double sx, double sy,
                           int width, int height) {
  Footprint f;
  const double nx = final_transform.linear(0, 0) * sx + final_transform.linear(0, 1) * sy +
                    final_transform.translation(0);
  const double ny = final_transform.linear(1, 0) * sx + final_transform.linear(1, 1) * sy +
                    final_transform.translation(1);
  const double xp = (nx + 1.0) * 0.5 * width;
  const double yp = (ny + 1.0) * 0.5 * height;
  const double fx = std::floor(xp), fy = std::floor(yp);
  // Range-check on doubles before the int cast: positions can be huge.
  if (!(fx >= 0.0) || !(fx < width) || !(fy >= 0.0) || !(fy < height)) {
    f.in_image = false;
    return f;
  }
  f.cx = static_cast<int>(fx);
  f.cy = static_cast<int>(fy);
  f.in_image = true;

  const double ex = xp - fx - 0.5, ey = yp - fy - 0.5;
  const double a0x = std::exp(-2.0 * ex * ex), tx = std::exp(4.0 * ex);
  const double a0y = std::exp(-2.0 * ey * ey), ty = std::exp(4.0 * ey);
  f.ax[0] = a0x * kExpNeg2 / tx;
  f.ax[1] = a0x;
  f.ax[2] = a0x * kExpNeg2 * tx;
  f.ay[0] = a0y * kExpNeg2 / ty;
  f.ay[1] = a0y;
  f.ay[2] = a0y * kExpNeg2 * ty;
  f.dx[0] = ex + 1.0;
  f.dx[1] = ex;
  f.dx[2] = ex - 1.0;
  f.dy[0] = ey + 1.0;
  f.dy[1] = ey;
  f.dy[2] = ey - 1.0;
  return f;
}

// Smooth roll-off factor and its d/d(d2); 1 / 0 outside the shell.
inline double roll(double d2, double& deriv) {
  if (d2 <= kKernelRollStart) {
    deriv = 0.0;
    return 1.0;
  }
  const double span = kKernelRollEnd - kKernelRollStart;
  const double t = (kKernelRollEnd - d2) / span;
  deriv = -6.0 * t * (1.0 - t) / span;
  return t * t * (3.0 - 2.0 * t);
}

void splat_range(SplatBuffer& buffer, const SampleBatch& batch,
                 const AffineMap& final_transform, long long begin, long long end) {
  const int W = buffer.width, H = buffer.height, nf = buffer.channels;
  double* data = buffer.data.data();
  const double* pos = batch.positions.data();
  const double* qual = batch.qualities.data();
  for (long long s = begin; s < end; ++s) {
    if (!batch.alive[s]) continue;
    const Footprint f = footprint(final_transform, pos[2 * s], pos[2 * s + 1], W, H);
    if (!f.in_image) continue;
    const double* q = qual + s * nf;
    for (int j = 0; j < 3; ++j) {
      const int py = f.cy + j - 1;
      if (py < 0 || py >= H) continue;
      for (int i = 0; i < 3; ++i) {
        const int px = f.cx + i - 1;
        if (px < 0 || px >= W) continue;
        const double d2 = f.dx[i] * f.dx[i] + f.dy[j] * f.dy[j];
        if (d2 >= kKernelRollEnd) continue;
        double gderiv;
        const double w = f.ax[i] * f.ay[j] * roll(d2, gderiv);
        double* dest = data + (static_cast<long long>(py) * W + px) * nf;
        for (int c = 0; c < nf; ++c) dest[c] += w * q[c];
      }
    }
  }
}

}  // namespace

void splat_accumulate(SplatBuffer& buffer, const SampleBatch& batch,
                      const AffineMap& final_transform, int threads) {
  if (buffer.channels != batch.n_generators)
    throw std::invalid_argument("splat_accumulate: channel count mismatch");
  const long long n = batch.sample_count();
  const int workers = std::min<long long>(resolve_threads(threads), std::max(1LL, n));
  if (workers <= 1) {
    splat_range(buffer, batch, final_transform, 0, n);
    return;
  }
  // Per-worker partial buffers merged in chunk order: reproducible for a
  // fixed thread count.
  std::vector<SplatBuffer> parts(workers);
  for (auto& p : parts) p = SplatBuffer::zeros(buffer.width, buffer.height, buffer.channels);
  parallel_chunks(n, workers, [&](long long begin, long long end, int chunk) {
    splat_range(parts[chunk], batch, final_transform, begin, end);
  });
  for (const auto& p : parts) buffer.data += p.data;
}

SplatBuffer splat(const SampleBatch& batch, const AffineMap& final_transform, int width,
                  int height, int threads) {
  SplatBuffer buffer = SplatBuffer::zeros(width, height, batch.n_generators);
  splat_accumulate(buffer, batch, final_transform, threads);
  return buffer;
}

SplatBackward splat_backward(const SampleBatch& batch, const AffineMap& final_transform,
                             int width, int height, const MatX& buffer_adjoint,
                             int threads) {
  if (buffer_adjoint.rows() != static_cast<Eigen::Index>(width) * height ||
      buffer_adjoint.cols() != batch.n_generators)
    throw std::invalid_argument("splat_backward: adjoint shape mismatch");

  const long long n = batch.sample_count();
  const int nf = batch.n_generators;
  SplatBackward out;
  out.adjoint_positions = MatX2::Zero(n, 2);
  out.adjoint_qualities = MatX::Zero(n, nf);

  const int workers = resolve_threads(threads);
  std::vector<AffineGrad> final_parts(workers, AffineGrad::Zero());

  parallel_chunks(n, threads, [&](long long begin, long long end, int chunk) {
    AffineGrad fgrad = AffineGrad::Zero();
    const double* pos = batch.positions.data();
    const double* qual = batch.qualities.data();
    const double* adj = buffer_adjoint.data();
    for (long long s = begin; s < end; ++s) {
      if (!batch.alive[s]) continue;
      const double sx = pos[2 * s], sy = pos[2 * s + 1];
      const Footprint f = footprint(final_transform, sx, sy, width, height);
      if (!f.in_image) continue;
      const double* q = qual + s * nf;
      double* aq = out.adjoint_qualities.data() + s * nf;
      double dxp = 0.0, dyp = 0.0;  // dL/d(pixel coords)
      for (int j = 0; j < 3; ++j) {
        const int py = f.cy + j - 1;
        if (py < 0 || py >= height) continue;
        for (int i = 0; i < 3; ++i) {
          const int px = f.cx + i - 1;
          if (px < 0 || px >= width) continue;
          const double d2 = f.dx[i] * f.dx[i] + f.dy[j] * f.dy[j];
          if (d2 >= kKernelRollEnd) continue;
          double gderiv;
          const double g = roll(d2, gderiv);
          const double base = f.ax[i] * f.ay[j];
          const double w = base * g;
          const double* a = adj + (static_cast<long long>(py) * width + px) * nf;
          double qa = 0.0;
          for (int c = 0; c < nf; ++c) {
            aq[c] += w * a[c];
            qa += q[c] * a[c];
          }
          // w(d2) = exp(-2 d2) * g(d2); d(d2)/d(xp) = 2 dx.
          const double dw = base * (-2.0 * g + gderiv);
          dxp += qa * dw * 2.0 * f.dx[i];
          dyp += qa * dw * 2.0 * f.dy[j];
        }
      }
      const double dnx = dxp * 0.5 * width;   // dL/d(ndc)
      const double dny = dyp * 0.5 * height;
      fgrad(0) += dnx * sx;
      fgrad(1) += dnx * sy;
      fgrad(2) += dnx;
      fgrad(3) += dny * sx;
      fgrad(4) += dny * sy;
      fgrad(5) += dny;
      out.adjoint_positions(s, 0) =
          final_transform.linear(0, 0) * dnx + final_transform.linear(1, 0) * dny;
      out.adjoint_positions(s, 1) =
          final_transform.linear(0, 1) * dnx + final_transform.linear(1, 1) * dny;
    }
    final_parts[chunk] += fgrad;
  });

  for (const auto& p : final_parts) out.final_transform += p;
  return out;
}

}  // namespace flamegrad
