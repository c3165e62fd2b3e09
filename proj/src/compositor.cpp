#include "flamegrad/compositor.hpp"

#include <stdexcept>

namespace flamegrad {

namespace {

void check_layers(const std::vector<RgbaBuffer>& layers) {
  if (layers.empty()) throw std::invalid_argument("composite: no layers");
  for (const auto& l : layers)
    if (l.width != layers[0].width || l.height != layers[0].height)
      throw std::invalid_argument("composite: layer sizes differ");
}

}  // namespace

RgbBuffer composite(const std::vector<RgbaBuffer>& layers, const Vec3& background) {
  check_layers(layers);
  RgbBuffer out = RgbBuffer::filled(layers[0].width, layers[0].height, background);
  for (const auto& layer : layers) {
    const auto a = layer.data.col(3);
    for (int c = 0; c < 3; ++c)
      out.data.col(c) =
          a.cwiseProduct(layer.data.col(c)) + (1.0 - a.array()).matrix().cwiseProduct(out.data.col(c));
  }
  return out;
}

double mse_loss(const RgbBuffer& image, const RgbBuffer& reference) {
  if (image.width != reference.width || image.height != reference.height)
    throw std::invalid_argument("mse_loss: size mismatch");
  return (image.data - reference.data).squaredNorm() /
         static_cast<double>(image.data.size());
}

CompositeLossBackward composite_and_loss_backward(const std::vector<RgbaBuffer>& layers,
                                                  const Vec3& background,
                                                  bool background_learnable,
                                                  const RgbBuffer& reference) {
  check_layers(layers);
  const Eigen::Index n = layers[0].data.rows();
  const size_t K = layers.size();

  // Forward, keeping the running composite below each layer.
  std::vector<MatX3> under(K);
  RgbBuffer out = RgbBuffer::filled(layers[0].width, layers[0].height, background);
  for (size_t k = 0; k < K; ++k) {
    under[k] = out.data;
    const auto a = layers[k].data.col(3);
    for (int c = 0; c < 3; ++c)
      out.data.col(c) = a.cwiseProduct(layers[k].data.col(c)) +
                        (1.0 - a.array()).matrix().cwiseProduct(out.data.col(c));
  }

  CompositeLossBackward back;
  back.loss = mse_loss(out, reference);
  back.layer_adjoints.assign(K, MatX4::Zero(n, 4));

  MatX3 dout = (out.data - reference.data) * (2.0 / static_cast<double>(out.data.size()));
  for (size_t k = K; k-- > 0;) {
    const auto a = layers[k].data.col(3);
    MatX4& adj = back.layer_adjoints[k];
    for (int c = 0; c < 3; ++c) {
      adj.col(c) = a.cwiseProduct(dout.col(c));
      adj.col(3) += (layers[k].data.col(c) - under[k].col(c)).cwiseProduct(dout.col(c));
    }
    for (int c = 0; c < 3; ++c)
      dout.col(c) = (1.0 - a.array()).matrix().cwiseProduct(dout.col(c));
  }
  if (background_learnable) back.background = dout.colwise().sum().transpose();
  return back;
}

}  // namespace flamegrad
