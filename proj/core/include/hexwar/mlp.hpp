#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hexwar/rng.hpp"

namespace hexwar {

// Fully connected network: rectifier on hidden layers, identity output.
// Batched calls take one sample per column.
class Mlp {
 public:
  struct Layer {
    Eigen::MatrixXd weights;  // out x in
    Eigen::VectorXd bias;     // out
  };

  // Same shapes as the network's layers.
  struct Gradients {
    std::vector<Layer> layers;

    double max_abs() const;
    bool all_finite() const;
  };

  Mlp() = default;
  // All parameters zero. Requires at least two sizes, all positive.
  explicit Mlp(std::vector<int> layer_sizes);
  // He-uniform weights, zero biases.
  static Mlp random(std::vector<int> layer_sizes, Rng& rng);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  std::size_t num_params() const;

  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  // Throws std::invalid_argument on size mismatch.
  Eigen::VectorXd forward(std::span<const double> x) const;
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const;

  // Exact gradient of sum over samples of upstream(:,k) . y(:,k) with
  // respect to every parameter.
  Gradients gradient(std::span<const double> x, std::span<const double> upstream) const;
  Gradients gradient_batch(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& upstream) const;

  Gradients zero_gradients() const;

  // Parameters in a fixed order: per layer, weights row-major, then bias.
  std::vector<double> flatten() const;
  void unflatten(std::span<const double> params);

  bool all_finite() const;

  friend bool operator==(const Mlp& a, const Mlp& b);

 private:
  std::vector<int> sizes_;
  std::vector<Layer> layers_;
};

// Plain gradient descent: params -= lr * grads.
void sgd_step(Mlp& net, const Mlp::Gradients& grads, double lr);

// Adam with bias correction. State is sized lazily on first use.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(Mlp& net, const Mlp::Gradients& grads, double lr);

 private:
  double beta1_, beta2_, eps_;
  long long t_ = 0;
  std::vector<Mlp::Layer> m_, v_;
};

}  // namespace hexwar
