#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "weaklab/rng.hpp"

namespace weaklab {

enum class Architecture : std::int32_t {
  Linear = 0,  // d -> c
  Hidden = 1,  // d -> H (ReLU) -> c
};

std::string_view to_string(Architecture arch);
Architecture parse_architecture(std::string_view name);

/// Fully connected layer; weights are row-major (outputs x inputs).
struct DenseLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Weights and biases of the classifier. Gradients and optimizer velocity
/// buffers use the same type so that shapes always line up.
struct ModelParameters {
  Architecture architecture = Architecture::Linear;
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;  // 0 for Linear
  std::size_t classes = 0;
  std::vector<DenseLayer> layers;

  /// All-zero parameters of the given shape.
  static ModelParameters zeros(Architecture arch, std::size_t input_dim, std::size_t hidden_dim,
                               std::size_t classes);
  /// Glorot-uniform weights, zero biases.
  static ModelParameters glorot(Architecture arch, std::size_t input_dim, std::size_t hidden_dim,
                                std::size_t classes, Rng& rng);

  bool same_shape(const ModelParameters& other) const;
  bool all_finite() const;
  std::size_t parameter_count() const;

  /// Flat views over every weight and bias block, in serialization order.
  std::vector<std::span<double>> blocks();
  std::vector<std::span<const double>> blocks() const;

  friend bool operator==(const ModelParameters&, const ModelParameters&) = default;
};

/// Scores h(x) of the configured architecture.
std::vector<double> forward(const ModelParameters& params, std::span<const double> x);

/// omega^T dh/dtheta: the parameter gradient of any loss whose score
/// gradient is omega. Linear in omega.
ModelParameters backward(const ModelParameters& params, std::span<const double> x,
                         std::span<const double> omega);

/// Scratch buffers for the allocation-free training path.
struct ForwardCache {
  std::vector<double> hidden_pre;
  std::vector<double> hidden;
  std::vector<double> scores;
  std::vector<double> hidden_grad;
};

/// Forward pass that keeps the activations needed by accumulate_gradient.
void forward_cached(const ModelParameters& params, std::span<const double> x, ForwardCache& cache);

/// grads += scale * backward(params, x, omega), reusing the cached activations.
void accumulate_gradient(const ModelParameters& params, std::span<const double> x,
                         std::span<const double> omega, double scale, ForwardCache& cache,
                         ModelParameters& grads);

/// argmax of the scores, ties resolved toward the lowest index.
std::size_t predict(const ModelParameters& params, std::span<const double> x);

struct OptimizerState {
  ModelParameters velocity;
  double learning_rate = 0.05;
  double momentum = 0.9;
  double weight_decay = 1e-6;

  static OptimizerState for_parameters(const ModelParameters& params, double learning_rate,
                                       double momentum, double weight_decay);
  void validate() const;
};

/// SGD with weight decay and Nesterov momentum. The stored parameters are
/// the look-ahead point, so the gradient passed in is already evaluated
/// there:
///   g <- g + lambda * theta
///   v <- mu * v - lr * g
///   theta <- theta + mu * v - lr * g
void step(ModelParameters& params, OptimizerState& state, const ModelParameters& grads);

/// Binary checkpoint: architecture, d, H, c as little-endian int32, then each
/// layer's weights and biases as little-endian float64, row-major.
void write_parameters(std::ostream& out, const ModelParameters& params);
ModelParameters read_parameters(std::istream& in);
void save_parameters(const std::string& path, const ModelParameters& params);
ModelParameters load_parameters(const std::string& path);

}  // namespace weaklab
