#include <doctest.h>

#include <cmath>
#include <vector>

#include "weaklab/datagen.hpp"
#include "weaklab/estimation.hpp"

using namespace weaklab;

namespace {

std::vector<LabeledInstance> labelled(const std::vector<std::size_t>& labels) {
  std::vector<LabeledInstance> out;
  for (std::size_t label : labels) out.push_back({{0.0, 0.0}, label, 1});
  return out;
}

}  // namespace

TEST_CASE("confusion rows are indexed by the prediction") {
  const std::vector<std::size_t> predictions{0, 0, 0, 1, 1, 2};
  const auto data = labelled({0, 1, 1, 1, 1, 0});
  const ConfusionCounts counts = confusion_counts(predictions, data, 3);
  CHECK(counts(0, 0) == 1);
  CHECK(counts(0, 1) == 2);
  CHECK(counts(1, 1) == 2);
  CHECK(counts(2, 0) == 1);
  CHECK(counts.total() == 6);
  const std::vector<std::size_t> short_predictions{0};
  CHECK_THROWS(confusion_counts(short_predictions, data, 3));
}

TEST_CASE("smoothing and the empty-row fallback") {
  ConfusionCounts counts{3, {2, 1, 0, 0, 0, 0, 0, 0, 4}};
  const TransitionMatrix t = estimate_transition(counts, 0.5);
  // row 0: (2.5, 1.5, 0.5) / 4.5
  CHECK(t(0, 0) == doctest::Approx(2.5 / 4.5));
  CHECK(t(0, 1) == doctest::Approx(1.5 / 4.5));
  CHECK(t(0, 2) == doctest::Approx(0.5 / 4.5));
  // row 1 has no counts at all
  CHECK(t(1, 0) == 0.0);
  CHECK(t(1, 1) == 1.0);
  CHECK(t(1, 2) == 0.0);
  CHECK(t(2, 2) == doctest::Approx(4.5 / 5.5));

  const TransitionMatrix raw = estimate_transition(counts, 0.0);
  CHECK(raw(0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(raw(0, 2) == 0.0);
  CHECK_THROWS(estimate_transition(counts, -1.0));
}

TEST_CASE("a perfect baseline recovers the sampling matrix") {
  // With predictions equal to the true labels, the estimate is the
  // empirical corruption matrix up to smoothing.
  Rng rng(1);
  const Dataset clean = generate_blobs(4, 4, 5000, 0.2, rng);
  const std::vector<SourceSpec> specs{
      {0, TransitionMatrix::identity(4), 100, 1.0},
      {1, make_template(TemplateKind::Uniform, 4, 0.4), 15000, 1.0}};
  const MultisourceSplit split = build_multisource(clean, specs, 2);
  std::vector<std::size_t> truth;
  for (std::size_t idx : split.train.origin[1]) truth.push_back(clean.instances[idx].label);
  const TransitionMatrix t =
      estimate_transition(confusion_counts(truth, split.train.sources[1], 4), 0.5);
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(std::abs(t(j, k) - specs[1].matrix(j, k)) < 0.03);
    }
  }
}

TEST_CASE("baseline must be trained with the vanilla strategy") {
  const auto data = labelled({0, 1});
  TrainConfig config;
  config.strategy = Strategy::Forward;
  CHECK_THROWS(train_baseline(data, 2, 2, config));
  CHECK_THROWS(train_baseline({}, 2, 2, TrainConfig{}));
}

TEST_CASE("oracle counts on clean data are diagonal") {
  const auto data = labelled({0, 1, 2, 2, 1});
  const std::vector<std::size_t> truth{0, 1, 2, 2, 1};
  const ConfusionCounts counts = confusion_counts(truth, data, 3);
  CHECK(counts.total() == 5);
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t k = 0; k < 3; ++k) {
      if (j != k) CHECK(counts(j, k) == 0);
    }
  }
  CHECK(estimate_transition(counts, 0.0) == TransitionMatrix::identity(3));
}

TEST_CASE("worked normalisation examples") {
  ConfusionCounts scaled{3, {1000, 0, 0, 0, 1000, 0, 0, 0, 1000}};
  const TransitionMatrix near_identity = estimate_transition(scaled);
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(std::abs(near_identity(j, k) - (j == k ? 1.0 : 0.0)) <= 1e-3);
    }
  }
  ConfusionCounts pair{2, {8, 2, 0, 5}};
  const TransitionMatrix t = estimate_transition(pair, 0.0);
  CHECK(t(0, 0) == doctest::Approx(0.8));
  CHECK(t(0, 1) == doctest::Approx(0.2));
}

TEST_CASE("estimates are row-stochastic for random counts") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    ConfusionCounts counts{5, std::vector<std::uint64_t>(25)};
    for (auto& cell : counts.cells) cell = rng.uniform() < 0.4 ? 0 : rng.index(50);
    const double smoothing = trial % 2 == 0 ? 0.0 : 0.5;
    CHECK_NOTHROW(estimate_transition(counts, smoothing));  // validates rows
  }
}

TEST_CASE("oracle estimation error shrinks with the sample size") {
  Rng rng(4);
  const Dataset clean = generate_blobs(10, 4, 2600, 0.3, rng);
  const TransitionMatrix truth = make_template(TemplateKind::MixedClassDependent, 10, 0.3);
  double errors[2];
  const std::size_t sizes[2] = {2000, 20000};
  for (int i = 0; i < 2; ++i) {
    const std::vector<SourceSpec> specs{{0, TransitionMatrix::identity(10), 10, 1.0},
                                        {1, truth, sizes[i], 1.0}};
    const MultisourceSplit split = build_multisource(clean, specs, 5);
    std::vector<std::size_t> labels;
    for (std::size_t idx : split.train.origin[1]) labels.push_back(clean.instances[idx].label);
    const TransitionMatrix t =
        estimate_transition(confusion_counts(labels, split.train.sources[1], 10), 0.5);
    errors[i] = 0.0;
    for (std::size_t c = 0; c < 100; ++c) {
      errors[i] = std::max(errors[i], std::abs(t.entries()[c] - truth.entries()[c]));
    }
  }
  CHECK(errors[0] >= 2.0 * errors[1]);
}

TEST_CASE("single matrix over clean plus a 9x weak source is the mixture") {
  Rng rng(6);
  const Dataset clean = generate_blobs(4, 4, 10000, 0.2, rng);
  const TransitionMatrix t = make_template(TemplateKind::Uniform, 4, 0.4);
  const std::vector<SourceSpec> specs{{0, TransitionMatrix::identity(4), 3000, 1.0},
                                      {1, t, 27000, 1.0}};
  const MultisourceSplit split = build_multisource(clean, specs, 7);
  const auto all = split.train.merged();
  std::vector<std::size_t> truth;
  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t idx : split.train.origin[s]) truth.push_back(clean.instances[idx].label);
  }
  const TransitionMatrix single = estimate_transition(confusion_counts(truth, all, 4));
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t k = 0; k < 4; ++k) {
      const double expected = 0.1 * (j == k ? 1.0 : 0.0) + 0.9 * t(j, k);
      CHECK(std::abs(single(j, k) - expected) < 0.02);
    }
  }

  // clean-only training set with an oracle baseline gives the identity
  std::vector<std::size_t> clean_truth;
  for (std::size_t idx : split.train.origin[0]) clean_truth.push_back(clean.instances[idx].label);
  CHECK(estimate_transition(confusion_counts(clean_truth, split.train.sources[0], 4), 0.0) ==
        TransitionMatrix::identity(4));
}
