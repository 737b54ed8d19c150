#include "weaklab/estimation.hpp"

#include <numeric>
#include <stdexcept>

namespace weaklab {

std::uint64_t ConfusionCounts::total() const {
  return std::accumulate(cells.begin(), cells.end(), std::uint64_t{0});
}

ModelParameters train_baseline(std::span<const LabeledInstance> clean, std::size_t classes,
                               std::size_t dim, const TrainConfig& config,
                               const EpochObserver& observer) {
  if (clean.empty()) throw std::invalid_argument("train_baseline: clean set is empty");
  if (config.strategy != Strategy::Vanilla) {
    throw std::invalid_argument("train_baseline: the baseline uses the vanilla strategy");
  }
  return train_model(clean, classes, dim, config, {}, observer).params;
}

ConfusionCounts confusion_counts(std::span<const std::size_t> predictions,
                                 std::span<const LabeledInstance> source_data,
                                 std::size_t classes) {
  if (predictions.size() != source_data.size()) {
    throw std::invalid_argument("confusion_counts: one prediction per instance required");
  }
  ConfusionCounts counts{classes, std::vector<std::uint64_t>(classes * classes, 0)};
  for (std::size_t i = 0; i < source_data.size(); ++i) {
    if (predictions[i] >= classes || source_data[i].label >= classes) {
      throw std::invalid_argument("confusion_counts: class index out of range");
    }
    ++counts.cells[predictions[i] * classes + source_data[i].label];
  }
  return counts;
}

ConfusionCounts confusion_counts(const ModelParameters& baseline,
                                 std::span<const LabeledInstance> source_data) {
  std::vector<std::size_t> predictions;
  predictions.reserve(source_data.size());
  for (const LabeledInstance& instance : source_data) {
    predictions.push_back(predict(baseline, instance.features));
  }
  return confusion_counts(predictions, source_data, baseline.classes);
}

TransitionMatrix estimate_transition(const ConfusionCounts& counts, double smoothing) {
  if (!(smoothing >= 0.0)) throw std::invalid_argument("smoothing must be non-negative");
  const std::size_t c = counts.classes;
  std::vector<double> entries(c * c, 0.0);
  for (std::size_t j = 0; j < c; ++j) {
    std::uint64_t raw = 0;
    for (std::size_t k = 0; k < c; ++k) raw += counts(j, k);
    if (raw == 0) {
      entries[j * c + j] = 1.0;
      continue;
    }
    const double total = static_cast<double>(raw) + smoothing * static_cast<double>(c);
    for (std::size_t k = 0; k < c; ++k) {
      entries[j * c + k] = (static_cast<double>(counts(j, k)) + smoothing) / total;
    }
  }
  return TransitionMatrix(c, std::move(entries));
}

TransitionMatrix estimate_single(const ModelParameters& baseline,
                                 std::span<const LabeledInstance> all_train, double smoothing) {
  if (all_train.empty()) throw std::invalid_argument("estimate_single: empty training set");
  return estimate_transition(confusion_counts(baseline, all_train), smoothing);
}

}  // namespace weaklab
