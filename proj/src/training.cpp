#include "weaklab/training.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

#include "weaklab/correction.hpp"

namespace weaklab {

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::Vanilla: return "vanilla";
    case Strategy::Forward: return "forward";
    case Strategy::Proposed: return "proposed";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "vanilla") return Strategy::Vanilla;
  if (name == "forward") return Strategy::Forward;
  if (name == "proposed") return Strategy::Proposed;
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  if (batch_size == 0) throw std::invalid_argument("batch size must be at least 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("momentum must lie in [0, 1)");
  if (!(weight_decay >= 0.0)) throw std::invalid_argument("weight decay must be non-negative");
  if (architecture == Architecture::Hidden && hidden_dim == 0) {
    throw std::invalid_argument("hidden architecture needs a positive width");
  }
  loss.validate();
}

TrainResult train_model(std::span<const LabeledInstance> data, std::size_t classes,
                        std::size_t dim, const TrainConfig& config,
                        const Correction& correction, const EpochObserver& observer) {
  config.validate();
  if (data.empty()) throw std::invalid_argument("train_model: empty training set");

  auto matrix_for = [&](const LabeledInstance& instance) -> const TransitionMatrix& {
    if (config.strategy == Strategy::Forward) return correction.matrices.front();
    return correction.matrices[instance.source_id];
  };
  if (config.strategy == Strategy::Forward && correction.matrices.size() != 1) {
    throw std::invalid_argument("forward strategy needs exactly one correction matrix");
  }
  for (const LabeledInstance& instance : data) {
    if (instance.features.size() != dim || instance.label >= classes) {
      throw std::invalid_argument("train_model: instance shape does not match the model");
    }
    if (config.strategy == Strategy::Proposed &&
        instance.source_id >= correction.matrices.size()) {
      throw std::invalid_argument("proposed strategy has no matrix for source " +
                                  std::to_string(instance.source_id));
    }
  }
  for (const TransitionMatrix& t : correction.matrices) {
    if (t.classes() != classes) throw std::invalid_argument("correction matrix has wrong size");
  }

  Rng init_rng(derive_seed(config.seed, 0));
  Rng shuffle_rng(derive_seed(config.seed, 1));
  TrainResult result{ModelParameters::glorot(config.architecture, dim, config.hidden_dim,
                                             classes, init_rng),
                     0, false};
  OptimizerState optimizer = OptimizerState::for_parameters(
      result.params, config.learning_rate, config.momentum, config.weight_decay);
  ModelParameters grads = ModelParameters::zeros(config.architecture, dim,
                                                 result.params.hidden_dim, classes);

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  ForwardCache cache;
  std::vector<double> omega(classes);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      const double scale = 1.0 / static_cast<double>(stop - start);
      for (std::span<double> block : grads.blocks()) std::fill(block.begin(), block.end(), 0.0);

      for (std::size_t b = start; b < stop; ++b) {
        const LabeledInstance& instance = data[order[b]];
        forward_cached(result.params, instance.features, cache);
        const std::vector<double> u = softmax(cache.scores);
        if (config.strategy == Strategy::Vanilla) {
          const double weight = instance.source_id < correction.source_weights.size()
                                    ? correction.source_weights[instance.source_id]
                                    : 1.0;
          weight_standard_floored(config.loss, weight, instance.label, u, omega);
        } else {
          weight_proposed_floored(config.loss, matrix_for(instance), instance.label, u, omega);
        }
        accumulate_gradient(result.params, instance.features, omega, scale, cache, grads);
      }
      step(result.params, optimizer, grads);
    }
    if (!result.params.all_finite()) {
      result.diverged = true;
      return result;
    }
    result.epochs_completed = epoch;
    if (observer) observer(epoch, result.params);
  }
  return result;
}

}  // namespace weaklab
