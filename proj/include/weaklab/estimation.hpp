#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "weaklab/datagen.hpp"
#include "weaklab/labelspace.hpp"
#include "weaklab/model.hpp"
#include "weaklab/training.hpp"

namespace weaklab {

/// c x c counts; cell (j, k) counts instances the baseline predicts as j
/// that the source labels k.
struct ConfusionCounts {
  std::size_t classes = 0;
  std::vector<std::uint64_t> cells;

  std::uint64_t operator()(std::size_t j, std::size_t k) const { return cells[j * classes + k]; }
  std::uint64_t total() const;
};

/// Default additive smoothing applied to every cell before normalisation.
inline constexpr double kDefaultSmoothing = 0.5;

/// Trains the baseline on the clean source with the vanilla strategy.
/// The observer sees every epoch, e.g. to keep the best checkpoint.
ModelParameters train_baseline(std::span<const LabeledInstance> clean, std::size_t classes,
                               std::size_t dim, const TrainConfig& config,
                               const EpochObserver& observer = {});

ConfusionCounts confusion_counts(const ModelParameters& baseline,
                                 std::span<const LabeledInstance> source_data);

/// Same as above with the baseline predictions supplied directly.
ConfusionCounts confusion_counts(std::span<const std::size_t> predictions,
                                 std::span<const LabeledInstance> source_data,
                                 std::size_t classes);

/// Row-normalises the counts after adding `smoothing` to every cell. A row
/// without any counts becomes the identity row.
TransitionMatrix estimate_transition(const ConfusionCounts& counts,
                                     double smoothing = kDefaultSmoothing);

/// One matrix for the whole training set, as used by the forward strategy.
TransitionMatrix estimate_single(const ModelParameters& baseline,
                                 std::span<const LabeledInstance> all_train,
                                 double smoothing = kDefaultSmoothing);

}  // namespace weaklab
