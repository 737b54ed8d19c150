#include "weaklab/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace weaklab {

namespace {

DenseLayer make_layer(std::size_t inputs, std::size_t outputs) {
  return DenseLayer{inputs, outputs, std::vector<double>(inputs * outputs, 0.0),
                    std::vector<double>(outputs, 0.0)};
}

void affine(const DenseLayer& layer, std::span<const double> in, std::span<double> out) {
  for (std::size_t o = 0; o < layer.outputs; ++o) {
    const double* w = layer.weights.data() + o * layer.inputs;
    double sum = layer.bias[o];
    for (std::size_t i = 0; i < layer.inputs; ++i) sum += w[i] * in[i];
    out[o] = sum;
  }
}

// grads += scale * delta * in^T, bias += scale * delta.
void accumulate_outer(DenseLayer& grad, std::span<const double> delta,
                      std::span<const double> in, double scale) {
  for (std::size_t o = 0; o < grad.outputs; ++o) {
    const double d = scale * delta[o];
    if (d == 0.0) continue;
    double* g = grad.weights.data() + o * grad.inputs;
    for (std::size_t i = 0; i < grad.inputs; ++i) g[i] += d * in[i];
    grad.bias[o] += d;
  }
}

void check_input(const ModelParameters& params, std::span<const double> x) {
  if (x.size() != params.input_dim) {
    throw std::invalid_argument("feature vector has " + std::to_string(x.size()) +
                                " entries, model expects " + std::to_string(params.input_dim));
  }
}

void put_u32(std::ostream& out, std::uint32_t value) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xffu);
  out.write(bytes, 4);
}

void put_f64(std::ostream& out, double value) {
  const auto bits = std::bit_cast<std::uint64_t>(value);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
  out.write(bytes, 8);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
    throw std::runtime_error("parameter file: truncated header");
  }
  std::uint32_t value = 0;
  for (int i = 0; i < 4; ++i) value |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
  return value;
}

double get_f64(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
    throw std::runtime_error("parameter file: truncated values");
  }
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

std::string_view to_string(Architecture arch) {
  return arch == Architecture::Linear ? "linear" : "hidden";
}

Architecture parse_architecture(std::string_view name) {
  if (name == "linear") return Architecture::Linear;
  if (name == "hidden" || name == "mlp") return Architecture::Hidden;
  throw std::invalid_argument("unknown architecture '" + std::string(name) + "'");
}

ModelParameters ModelParameters::zeros(Architecture arch, std::size_t input_dim,
                                       std::size_t hidden_dim, std::size_t classes) {
  if (input_dim == 0 || classes == 0) throw std::invalid_argument("empty model shape");
  ModelParameters params;
  params.architecture = arch;
  params.input_dim = input_dim;
  params.classes = classes;
  if (arch == Architecture::Linear) {
    params.layers.push_back(make_layer(input_dim, classes));
  } else {
    if (hidden_dim == 0) throw std::invalid_argument("hidden architecture needs H >= 1");
    params.hidden_dim = hidden_dim;
    params.layers.push_back(make_layer(input_dim, hidden_dim));
    params.layers.push_back(make_layer(hidden_dim, classes));
  }
  return params;
}

ModelParameters ModelParameters::glorot(Architecture arch, std::size_t input_dim,
                                        std::size_t hidden_dim, std::size_t classes, Rng& rng) {
  ModelParameters params = zeros(arch, input_dim, hidden_dim, classes);
  for (DenseLayer& layer : params.layers) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.inputs + layer.outputs));
    for (double& w : layer.weights) w = rng.uniform(-limit, limit);
  }
  return params;
}

bool ModelParameters::same_shape(const ModelParameters& other) const {
  if (architecture != other.architecture || input_dim != other.input_dim ||
      hidden_dim != other.hidden_dim || classes != other.classes ||
      layers.size() != other.layers.size()) {
    return false;
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].inputs != other.layers[l].inputs ||
        layers[l].outputs != other.layers[l].outputs) {
      return false;
    }
  }
  return true;
}

bool ModelParameters::all_finite() const {
  for (std::span<const double> block : blocks()) {
    for (double v : block) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

std::size_t ModelParameters::parameter_count() const {
  std::size_t count = 0;
  for (const DenseLayer& layer : layers) count += layer.weights.size() + layer.bias.size();
  return count;
}

std::vector<std::span<double>> ModelParameters::blocks() {
  std::vector<std::span<double>> out;
  for (DenseLayer& layer : layers) {
    out.emplace_back(layer.weights);
    out.emplace_back(layer.bias);
  }
  return out;
}

std::vector<std::span<const double>> ModelParameters::blocks() const {
  std::vector<std::span<const double>> out;
  for (const DenseLayer& layer : layers) {
    out.emplace_back(layer.weights);
    out.emplace_back(layer.bias);
  }
  return out;
}

void forward_cached(const ModelParameters& params, std::span<const double> x,
                    ForwardCache& cache) {
  check_input(params, x);
  cache.scores.resize(params.classes);
  if (params.architecture == Architecture::Linear) {
    affine(params.layers[0], x, cache.scores);
    return;
  }
  cache.hidden_pre.resize(params.hidden_dim);
  cache.hidden.resize(params.hidden_dim);
  affine(params.layers[0], x, cache.hidden_pre);
  for (std::size_t i = 0; i < params.hidden_dim; ++i) {
    cache.hidden[i] = std::max(cache.hidden_pre[i], 0.0);
  }
  affine(params.layers[1], cache.hidden, cache.scores);
}

std::vector<double> forward(const ModelParameters& params, std::span<const double> x) {
  ForwardCache cache;
  forward_cached(params, x, cache);
  return std::move(cache.scores);
}

void accumulate_gradient(const ModelParameters& params, std::span<const double> x,
                         std::span<const double> omega, double scale, ForwardCache& cache,
                         ModelParameters& grads) {
  if (omega.size() != params.classes) {
    throw std::invalid_argument("weighting vector length does not match class count");
  }
  if (params.architecture == Architecture::Linear) {
    accumulate_outer(grads.layers[0], omega, x, scale);
    return;
  }
  const DenseLayer& out_layer = params.layers[1];
  accumulate_outer(grads.layers[1], omega, cache.hidden, scale);
  cache.hidden_grad.assign(params.hidden_dim, 0.0);
  for (std::size_t o = 0; o < out_layer.outputs; ++o) {
    if (omega[o] == 0.0) continue;
    const double* w = out_layer.weights.data() + o * out_layer.inputs;
    for (std::size_t h = 0; h < params.hidden_dim; ++h) cache.hidden_grad[h] += omega[o] * w[h];
  }
  for (std::size_t h = 0; h < params.hidden_dim; ++h) {
    if (cache.hidden_pre[h] <= 0.0) cache.hidden_grad[h] = 0.0;
  }
  accumulate_outer(grads.layers[0], cache.hidden_grad, x, scale);
}

ModelParameters backward(const ModelParameters& params, std::span<const double> x,
                         std::span<const double> omega) {
  ForwardCache cache;
  forward_cached(params, x, cache);
  ModelParameters grads =
      ModelParameters::zeros(params.architecture, params.input_dim, params.hidden_dim,
                             params.classes);
  accumulate_gradient(params, x, omega, 1.0, cache, grads);
  return grads;
}

std::size_t predict(const ModelParameters& params, std::span<const double> x) {
  const std::vector<double> scores = forward(params, x);
  // max_element keeps the first maximum.
  return static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) -
                                  scores.begin());
}

OptimizerState OptimizerState::for_parameters(const ModelParameters& params,
                                              double learning_rate, double momentum,
                                              double weight_decay) {
  OptimizerState state;
  state.velocity = ModelParameters::zeros(params.architecture, params.input_dim,
                                          params.hidden_dim, params.classes);
  state.learning_rate = learning_rate;
  state.momentum = momentum;
  state.weight_decay = weight_decay;
  state.validate();
  return state;
}

void OptimizerState::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("momentum must lie in [0, 1)");
  if (!(weight_decay >= 0.0)) throw std::invalid_argument("weight decay must be non-negative");
}

void step(ModelParameters& params, OptimizerState& state, const ModelParameters& grads) {
  if (!params.same_shape(grads) || !params.same_shape(state.velocity)) {
    throw std::invalid_argument("step: parameter, gradient and velocity shapes differ");
  }
  auto theta = params.blocks();
  auto velocity = state.velocity.blocks();
  const auto g = grads.blocks();
  const double lr = state.learning_rate;
  const double mu = state.momentum;
  const double decay = state.weight_decay;
  for (std::size_t b = 0; b < theta.size(); ++b) {
    for (std::size_t i = 0; i < theta[b].size(); ++i) {
      const double grad = g[b][i] + decay * theta[b][i];
      velocity[b][i] = mu * velocity[b][i] - lr * grad;
      theta[b][i] += mu * velocity[b][i] - lr * grad;
    }
  }
}

void write_parameters(std::ostream& out, const ModelParameters& params) {
  put_u32(out, static_cast<std::uint32_t>(params.architecture));
  put_u32(out, static_cast<std::uint32_t>(params.input_dim));
  put_u32(out, static_cast<std::uint32_t>(params.hidden_dim));
  put_u32(out, static_cast<std::uint32_t>(params.classes));
  for (std::span<const double> block : params.blocks()) {
    for (double v : block) put_f64(out, v);
  }
}

ModelParameters read_parameters(std::istream& in) {
  const std::uint32_t code = get_u32(in);
  if (code > 1) throw std::runtime_error("parameter file: unknown architecture code");
  const std::uint32_t d = get_u32(in);
  const std::uint32_t h = get_u32(in);
  const std::uint32_t c = get_u32(in);
  ModelParameters params = ModelParameters::zeros(static_cast<Architecture>(code), d, h, c);
  for (std::span<double> block : params.blocks()) {
    for (double& v : block) v = get_f64(in);
  }
  return params;
}

void save_parameters(const std::string& path, const ModelParameters& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_parameters(out, params);
  if (!out) throw std::runtime_error("failed writing " + path);
}

ModelParameters load_parameters(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_parameters(in);
}

}  // namespace weaklab
