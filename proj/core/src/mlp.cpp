#include "hexwar/mlp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hexwar {

namespace {

void check_sizes(const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw std::invalid_argument("Mlp needs at least input and output sizes");
  for (int n : sizes) {
    if (n < 1) throw std::invalid_argument("Mlp layer sizes must be positive");
  }
}

}  // namespace

double Mlp::Gradients::max_abs() const {
  double m = 0.0;
  for (const auto& l : layers) {
    if (l.weights.size() > 0) m = std::max(m, l.weights.cwiseAbs().maxCoeff());
    if (l.bias.size() > 0) m = std::max(m, l.bias.cwiseAbs().maxCoeff());
  }
  return m;
}

bool Mlp::Gradients::all_finite() const {
  for (const auto& l : layers) {
    if (!l.weights.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

Mlp::Mlp(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
  check_sizes(sizes_);
  for (std::size_t i = 0; i + 1 < sizes_.size(); ++i) {
    layers_.push_back({Eigen::MatrixXd::Zero(sizes_[i + 1], sizes_[i]),
                       Eigen::VectorXd::Zero(sizes_[i + 1])});
  }
}

Mlp Mlp::random(std::vector<int> layer_sizes, Rng& rng) {
  Mlp net(std::move(layer_sizes));
  for (auto& l : net.layers_) {
    const double limit = std::sqrt(6.0 / static_cast<double>(l.weights.cols()));
    // Row-major fill keeps the draw order independent of Eigen's storage.
    for (Eigen::Index i = 0; i < l.weights.rows(); ++i) {
      for (Eigen::Index j = 0; j < l.weights.cols(); ++j) {
        l.weights(i, j) = (2.0 * uniform_unit(rng) - 1.0) * limit;
      }
    }
  }
  return net;
}

std::size_t Mlp::num_params() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  return n;
}

Eigen::VectorXd Mlp::forward(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != input_size()) {
    throw std::invalid_argument("Mlp::forward: expected " + std::to_string(input_size()) +
                                " inputs, got " + std::to_string(x.size()));
  }
  Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    a = layers_[i].weights * a + layers_[i].bias;
    if (i + 1 < layers_.size()) a = a.cwiseMax(0.0);
  }
  return a;
}

Eigen::MatrixXd Mlp::forward_batch(const Eigen::MatrixXd& inputs) const {
  if (inputs.rows() != input_size()) {
    throw std::invalid_argument("Mlp::forward_batch: input row count mismatch");
  }
  Eigen::MatrixXd a = inputs;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    a = (layers_[i].weights * a).colwise() + layers_[i].bias;
    if (i + 1 < layers_.size()) a = a.cwiseMax(0.0);
  }
  return a;
}

Mlp::Gradients Mlp::gradient(std::span<const double> x, std::span<const double> upstream) const {
  if (static_cast<int>(x.size()) != input_size() ||
      static_cast<int>(upstream.size()) != output_size()) {
    throw std::invalid_argument("Mlp::gradient: shape mismatch");
  }
  const Eigen::MatrixXd in =
      Eigen::Map<const Eigen::MatrixXd>(x.data(), static_cast<Eigen::Index>(x.size()), 1);
  const Eigen::MatrixXd up = Eigen::Map<const Eigen::MatrixXd>(
      upstream.data(), static_cast<Eigen::Index>(upstream.size()), 1);
  return gradient_batch(in, up);
}

Mlp::Gradients Mlp::gradient_batch(const Eigen::MatrixXd& inputs,
                                   const Eigen::MatrixXd& upstream) const {
  if (inputs.rows() != input_size() || upstream.rows() != output_size() ||
      inputs.cols() != upstream.cols()) {
    throw std::invalid_argument("Mlp::gradient_batch: shape mismatch");
  }
  // Forward pass keeping every layer's activation.
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(layers_.size() + 1);
  acts.push_back(inputs);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Eigen::MatrixXd z = (layers_[i].weights * acts.back()).colwise() + layers_[i].bias;
    if (i + 1 < layers_.size()) z = z.cwiseMax(0.0);
    acts.push_back(std::move(z));
  }

  Gradients g;
  g.layers.resize(layers_.size());
  Eigen::MatrixXd delta = upstream;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    g.layers[k].weights = delta * acts[k].transpose();
    g.layers[k].bias = delta.rowwise().sum();
    if (k == 0) break;
    delta = layers_[k].weights.transpose() * delta;
    // Rectifier derivative, taken as 0 at exactly 0.
    delta = delta.cwiseProduct((acts[k].array() > 0.0).cast<double>().matrix());
  }
  return g;
}

Mlp::Gradients Mlp::zero_gradients() const {
  Gradients g;
  for (const auto& l : layers_) {
    g.layers.push_back({Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()),
                        Eigen::VectorXd::Zero(l.bias.size())});
  }
  return g;
}

std::vector<double> Mlp::flatten() const {
  std::vector<double> out;
  out.reserve(num_params());
  for (const auto& l : layers_) {
    for (Eigen::Index i = 0; i < l.weights.rows(); ++i) {
      for (Eigen::Index j = 0; j < l.weights.cols(); ++j) out.push_back(l.weights(i, j));
    }
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) out.push_back(l.bias(i));
  }
  return out;
}

void Mlp::unflatten(std::span<const double> params) {
  if (params.size() != num_params()) {
    throw std::invalid_argument("Mlp::unflatten: expected " + std::to_string(num_params()) +
                                " parameters, got " + std::to_string(params.size()));
  }
  std::size_t k = 0;
  for (auto& l : layers_) {
    for (Eigen::Index i = 0; i < l.weights.rows(); ++i) {
      for (Eigen::Index j = 0; j < l.weights.cols(); ++j) l.weights(i, j) = params[k++];
    }
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = params[k++];
  }
}

bool Mlp::all_finite() const {
  for (const auto& l : layers_) {
    if (!l.weights.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

bool operator==(const Mlp& a, const Mlp& b) {
  if (a.sizes_ != b.sizes_) return false;
  for (std::size_t i = 0; i < a.layers_.size(); ++i) {
    if (a.layers_[i].weights != b.layers_[i].weights || a.layers_[i].bias != b.layers_[i].bias) {
      return false;
    }
  }
  return true;
}

void sgd_step(Mlp& net, const Mlp::Gradients& grads, double lr) {
  auto& layers = net.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].weights -= lr * grads.layers[i].weights;
    layers[i].bias -= lr * grads.layers[i].bias;
  }
}

void AdamOptimizer::step(Mlp& net, const Mlp::Gradients& grads, double lr) {
  auto& layers = net.layers();
  if (m_.empty()) {
    m_ = net.zero_gradients().layers;
    v_ = net.zero_gradients().layers;
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  };
  for (std::size_t i = 0; i < layers.size(); ++i) {
    update(layers[i].weights, m_[i].weights, v_[i].weights, grads.layers[i].weights);
    update(layers[i].bias, m_[i].bias, v_[i].bias, grads.layers[i].bias);
  }
}

}  // namespace hexwar
