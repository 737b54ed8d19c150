#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "weaklab/config.hpp"
#include "weaklab/datagen.hpp"
#include "weaklab/estimation.hpp"
#include "weaklab/labelspace.hpp"
#include "weaklab/losses.hpp"
#include "weaklab/model.hpp"
#include "weaklab/training.hpp"

namespace weaklab {

/// A weak source in the layout, sized as a multiple of the clean source.
struct WeakSourceLayout {
  TemplateKind kind = TemplateKind::MixedClassDependent;
  double multiple = 9.0;
};

struct Combination {
  Strategy strategy = Strategy::Vanilla;
  LossFamily loss = LossFamily::CCE;
};

/// Default feature noise of the blob generator. With c = 10, d = 16 and unit
/// axis means, a 500-instance baseline reaches about 0.89 and a model
/// trained on ten times more clean data about 0.92.
inline constexpr double kDefaultSpread = 0.32;

struct ExperimentConfig {
  // clean data D
  std::size_t classes = 10;
  std::size_t dim = 16;
  std::size_t per_class = 1000;
  double spread = kDefaultSpread;
  std::size_t clean_count = 500;

  std::vector<WeakSourceLayout> weak_sources{{TemplateKind::MixedClassDependent, 9.0}};
  std::vector<double> etas{0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<Combination> combinations{{Strategy::Vanilla, LossFamily::CCE},
                                        {Strategy::Proposed, LossFamily::CCE}};
  std::vector<std::uint64_t> seeds{1, 2, 3};

  TrainConfig train;  // strategy, loss family and seed are set per run
  LossSpec loss;      // shared hyperparameters; family is the baseline's loss

  bool use_clean_in_training = true;
  std::size_t baseline_epoch_cap = 0;  // 0: same epochs as the main runs
  bool true_matrices = false;
  double smoothing = kDefaultSmoothing;
  std::size_t workers = 1;

  /// Reads the INI-style config (see configs/ for examples). Unknown keys
  /// are rejected.
  static ExperimentConfig from_config(const KeyValueConfig& config);
  void validate() const;

  /// e.g. "clean+mixed:9" or "uniform:3+landcover:3" without the clean source.
  std::string source_layout() const;
  std::vector<SourceSpec> source_specs(double eta) const;
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  double best_oa = 0.0;
  std::size_t best_epoch = 0;
  bool failed = false;
  std::vector<double> curve;  // OA after each epoch
};

struct ReportRow {
  std::string strategy;  // "baseline" for the clean-only classifier
  std::string loss;
  std::optional<double> eta;
  std::string source_layout;
  bool dominance_ok = true;
  std::vector<SeedOutcome> outcomes;
  double mean_oa = 0.0;
  double std_oa = 0.0;
};

struct RunReport {
  std::vector<ReportRow> rows;

  // Artifacts of the first (seed, eta) pair, written to the run directory.
  std::optional<ModelParameters> baseline;
  std::vector<TransitionMatrix> estimated;  // index s - 1 for weak source s
  std::optional<TransitionMatrix> estimated_single;
  // Estimates of every (seed, eta) pair: key "seed<seed>_eta<eta>".
  std::vector<std::pair<std::string, std::vector<TransitionMatrix>>> all_estimates;

  const ReportRow* find(std::string_view strategy, std::string_view loss,
                        std::optional<double> eta) const;
};

/// Fraction of instances whose predicted class equals the label.
double overall_accuracy(const ModelParameters& params, std::span<const LabeledInstance> test);

double mean(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double unbiased_std(std::span<const double> values);

/// Runs every (seed, eta, combination) of the config. Deterministic: the
/// result does not depend on config.workers.
RunReport run_experiment(const ExperimentConfig& config);

void write_report_csv(std::ostream& out, const RunReport& report);
void write_curves_csv(std::ostream& out, const RunReport& report);
void emit_csv(const RunReport& report, const std::string& path);
/// report.csv, curves.csv, baseline.params, T_hat_source<s>.txt (first seed
/// and eta), T_hat_single.txt when a forward run exists, and estimates/ with
/// the matrices of every (seed, eta) pair.
void write_run_directory(const RunReport& report, const std::string& dir);

}  // namespace weaklab
