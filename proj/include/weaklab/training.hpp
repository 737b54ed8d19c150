#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "weaklab/datagen.hpp"
#include "weaklab/labelspace.hpp"
#include "weaklab/losses.hpp"
#include "weaklab/model.hpp"

namespace weaklab {

enum class Strategy {
  Vanilla,   // plain loss, optional per-source scalar weights
  Forward,   // one correction matrix for every instance
  Proposed,  // correction matrix chosen by the instance's source
};

std::string_view to_string(Strategy strategy);
Strategy parse_strategy(std::string_view name);

struct TrainConfig {
  std::size_t epochs = 60;
  std::size_t batch_size = 32;
  double learning_rate = 0.05;
  double momentum = 0.9;
  double weight_decay = 1e-6;
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::Vanilla;
  LossSpec loss;
  Architecture architecture = Architecture::Hidden;
  std::size_t hidden_dim = 32;

  void validate() const;
};

/// Matrices consumed by the correcting strategies. For Forward, `matrices`
/// holds exactly one matrix; for Proposed, matrices[s] belongs to source s.
/// `source_weights` (indexed by source id, default 1) only affects Vanilla.
struct Correction {
  std::vector<TransitionMatrix> matrices;
  std::vector<double> source_weights;
};

struct TrainResult {
  ModelParameters params;
  std::size_t epochs_completed = 0;
  bool diverged = false;
};

/// Called after every epoch (1-based) with the current parameters.
using EpochObserver = std::function<void(std::size_t epoch, const ModelParameters&)>;

/// Minibatch training with epoch-wise shuffling and Nesterov SGD. Parameters
/// are initialised from config.seed; the per-epoch shuffle draws from a
/// stream derived from the same seed. Every batch step uses the mean of the
/// per-instance gradients, the last partial batch included. Training stops
/// early with diverged = true when a parameter becomes non-finite.
/// epochs = 0 returns the initialisation.
TrainResult train_model(std::span<const LabeledInstance> data, std::size_t classes,
                        std::size_t dim, const TrainConfig& config,
                        const Correction& correction = {}, const EpochObserver& observer = {});

}  // namespace weaklab
