#include <doctest.h>

#include <vector>

#include "weaklab/correction.hpp"
#include "weaklab/datagen.hpp"
#include "weaklab/training.hpp"

using namespace weaklab;

namespace {

Dataset toy() {
  Rng rng(1);
  return generate_blobs(3, 4, 60, 0.3, rng);
}

double accuracy(const ModelParameters& p, const Dataset& d) {
  std::size_t hits = 0;
  for (const auto& inst : d.instances) hits += predict(p, inst.features) == inst.label;
  return static_cast<double>(hits) / static_cast<double>(d.instances.size());
}

TrainConfig quick(Strategy strategy) {
  TrainConfig config;
  config.epochs = 5;
  config.seed = 3;
  config.strategy = strategy;
  config.hidden_dim = 8;
  return config;
}

}  // namespace

TEST_CASE("training is deterministic for a seed") {
  const Dataset d = toy();
  const TrainResult a = train_model(d.instances, 3, 4, quick(Strategy::Vanilla));
  const TrainResult b = train_model(d.instances, 3, 4, quick(Strategy::Vanilla));
  CHECK(a.params == b.params);
  TrainConfig other = quick(Strategy::Vanilla);
  other.seed = 4;
  CHECK_FALSE(train_model(d.instances, 3, 4, other).params == a.params);
}

TEST_CASE("zero epochs returns the initialisation") {
  const Dataset d = toy();
  TrainConfig config = quick(Strategy::Vanilla);
  config.epochs = 0;
  const TrainResult result = train_model(d.instances, 3, 4, config);
  CHECK(result.epochs_completed == 0);
  TrainConfig one = config;
  one.epochs = 1;
  std::size_t calls = 0;
  train_model(d.instances, 3, 4, one, {}, [&](std::size_t epoch, const ModelParameters&) {
    CHECK(epoch == 1);
    ++calls;
  });
  CHECK(calls == 1);
}

TEST_CASE("every strategy learns separable blobs") {
  const Dataset d = toy();
  CHECK(accuracy(train_model(d.instances, 3, 4, quick(Strategy::Vanilla)).params, d) > 0.95);

  Correction forward;
  forward.matrices = {TransitionMatrix::identity(3)};
  CHECK(accuracy(train_model(d.instances, 3, 4, quick(Strategy::Forward), forward).params, d) >
        0.95);

  Correction proposed;
  proposed.matrices = {TransitionMatrix::identity(3)};
  CHECK(accuracy(train_model(d.instances, 3, 4, quick(Strategy::Proposed), proposed).params, d) >
        0.95);
}

TEST_CASE("identity corrections reproduce vanilla training exactly") {
  const Dataset d = toy();
  Correction proposed;
  proposed.matrices = {TransitionMatrix::identity(3)};
  const TrainResult vanilla = train_model(d.instances, 3, 4, quick(Strategy::Vanilla));
  const TrainResult corrected = train_model(d.instances, 3, 4, quick(Strategy::Proposed), proposed);
  const auto a = vanilla.params.blocks();
  const auto b = corrected.params.blocks();
  for (std::size_t blk = 0; blk < a.size(); ++blk) {
    for (std::size_t i = 0; i < a[blk].size(); ++i) CHECK(a[blk][i] == doctest::Approx(b[blk][i]));
  }
}

TEST_CASE("missing or mismatched corrections are rejected") {
  const Dataset d = toy();
  CHECK_THROWS(train_model(d.instances, 3, 4, quick(Strategy::Forward)));
  Correction two;
  two.matrices = {TransitionMatrix::identity(3), TransitionMatrix::identity(3)};
  CHECK_THROWS(train_model(d.instances, 3, 4, quick(Strategy::Forward), two));
  Correction wrong_size;
  wrong_size.matrices = {TransitionMatrix::identity(4)};
  CHECK_THROWS(train_model(d.instances, 3, 4, quick(Strategy::Proposed), wrong_size));
}

TEST_CASE("config validation") {
  TrainConfig config = quick(Strategy::Vanilla);
  config.batch_size = 0;
  CHECK_THROWS(config.validate());
  config = quick(Strategy::Vanilla);
  config.learning_rate = -1.0;
  CHECK_THROWS(config.validate());
  CHECK(parse_strategy(to_string(Strategy::Proposed)) == Strategy::Proposed);
  CHECK_THROWS(parse_strategy("backward"));
}

TEST_CASE("zero epochs sits near chance") {
  Rng rng(2);
  const Dataset d = generate_blobs(10, 16, 200, 0.3, rng);
  TrainConfig config = quick(Strategy::Vanilla);
  config.epochs = 0;
  const double oa = accuracy(train_model(d.instances, 10, 16, config).params, d);
  CHECK(oa < 0.3);
}

TEST_CASE("parameter trajectories are bit-identical across runs") {
  const Dataset d = toy();
  Correction proposed;
  proposed.matrices = {make_template(TemplateKind::Uniform, 3, 0.2)};
  std::vector<ModelParameters> first, second;
  TrainConfig config = quick(Strategy::Proposed);
  config.loss.family = LossFamily::GCE;
  train_model(d.instances, 3, 4, config, proposed,
              [&](std::size_t, const ModelParameters& p) { first.push_back(p); });
  train_model(d.instances, 3, 4, config, proposed,
              [&](std::size_t, const ModelParameters& p) { second.push_back(p); });
  CHECK(first.size() == 5);
  CHECK(first == second);
}

TEST_CASE("vanilla source weights scale the contribution of a source") {
  Dataset d = toy();
  for (std::size_t i = 0; i < d.instances.size(); i += 2) d.instances[i].source_id = 1;
  Correction weights;
  weights.source_weights = {1.0, 1.0};
  const TrainResult unit = train_model(d.instances, 3, 4, quick(Strategy::Vanilla), weights);
  CHECK(unit.params == train_model(d.instances, 3, 4, quick(Strategy::Vanilla)).params);
  weights.source_weights = {1.0, 0.0 + 1e-9};
  const TrainResult muted = train_model(d.instances, 3, 4, quick(Strategy::Vanilla), weights);
  CHECK_FALSE(muted.params == unit.params);
}

TEST_CASE("end-to-end gradients for every strategy and loss") {
  // Mean-batch gradient of one instance equals backward(weight vector).
  Rng rng(3);
  for (Strategy strategy : {Strategy::Vanilla, Strategy::Forward, Strategy::Proposed}) {
    for (LossFamily family : {LossFamily::CCE, LossFamily::MAE, LossFamily::GCE, LossFamily::SL}) {
      LossSpec spec;
      spec.family = family;
      for (int trial = 0; trial < 20; ++trial) {
        ModelParameters p = ModelParameters::glorot(Architecture::Hidden, 3, 5, 4, rng);
        std::vector<double> x(3);
        for (double& v : x) v = rng.normal();
        const std::size_t k = rng.index(4);
        const TransitionMatrix t = strategy == Strategy::Vanilla
                                       ? TransitionMatrix::identity(4)
                                       : make_template(TemplateKind::Uniform, 4, rng.uniform(0.0, 0.6));
        auto loss = [&] { return corrected_loss(spec, t, k, softmax(forward(p, x))); };
        const ModelParameters g = backward(p, x, weight_proposed(spec, t, k, softmax(forward(p, x))));
        auto blocks = p.blocks();
        const auto gb = g.blocks();
        for (std::size_t b = 0; b < blocks.size(); ++b) {
          for (std::size_t i = 0; i < blocks[b].size(); ++i) {
            const double saved = blocks[b][i];
            blocks[b][i] = saved + 1e-6;
            const double up = loss();
            blocks[b][i] = saved - 1e-6;
            const double down = loss();
            blocks[b][i] = saved;
            CHECK(gb[b][i] == doctest::Approx((up - down) / 2e-6).epsilon(1e-5).scale(1e-4));
          }
        }
      }
    }
  }
}
