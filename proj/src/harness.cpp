#include "weaklab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace weaklab {

namespace {

constexpr std::uint64_t kDataStream = 100;
constexpr std::uint64_t kBaselineStream = 200;
constexpr std::uint64_t kTrainStream = 300;

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.6g", value);
  return buffer;
}

std::string format_eta(const std::optional<double>& eta) {
  return eta ? format_number(*eta) : std::string();
}

// Runs the tasks on `workers` threads; results must be written to
// preassigned slots so the outcome is independent of scheduling.
void run_tasks(std::vector<std::function<void()>>& tasks, std::size_t workers) {
  if (workers <= 1 || tasks.size() <= 1) {
    for (auto& task : tasks) task();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      if (failed) return;
      try {
        tasks[i]();
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> threads;
  for (std::size_t w = 0; w < std::min(workers, tasks.size()); ++w) threads.emplace_back(worker);
  threads.clear();
  if (failure) std::rethrow_exception(failure);
}

// Tracks per-epoch test OA; keeps the first best epoch.
struct EpochTracker {
  std::span<const LabeledInstance> test;
  SeedOutcome* outcome;
  std::optional<ModelParameters>* best_params = nullptr;

  void operator()(std::size_t epoch, const ModelParameters& params) const {
    const double oa = overall_accuracy(params, test);
    outcome->curve.push_back(oa);
    if (outcome->best_epoch == 0 || oa > outcome->best_oa) {
      outcome->best_oa = oa;
      outcome->best_epoch = epoch;
      if (best_params) *best_params = params;
    }
  }
};

void aggregate(ReportRow& row) {
  std::vector<double> values;
  for (const SeedOutcome& outcome : row.outcomes) {
    if (!outcome.failed) values.push_back(outcome.best_oa);
  }
  row.mean_oa = values.empty() ? std::numeric_limits<double>::quiet_NaN() : mean(values);
  row.std_oa = values.empty() ? std::numeric_limits<double>::quiet_NaN() : unbiased_std(values);
}

std::string estimate_key(std::uint64_t seed, double eta) {
  return "seed" + std::to_string(seed) + "_eta" + format_number(eta);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_config(const KeyValueConfig& kv) {
  ExperimentConfig config;
  config.seeds = kv.get_seeds("seeds", config.seeds);
  config.workers = kv.get_size("workers", config.workers);

  config.classes = kv.get_size("dataset.classes", config.classes);
  config.dim = kv.get_size("dataset.dim", config.dim);
  config.per_class = kv.get_size("dataset.per_class", config.per_class);
  config.spread = kv.get_double("dataset.spread", config.spread);
  config.clean_count = kv.get_size("dataset.clean_count", config.clean_count);

  if (kv.has("sources.weak")) {
    config.weak_sources.clear();
    for (const std::string& item : kv.get_list("sources.weak", {})) {
      const auto colon = item.find(':');
      WeakSourceLayout layout;
      layout.kind = parse_template_kind(item.substr(0, colon));
      if (colon != std::string::npos) {
        layout.multiple = parse_double(item.substr(colon + 1), "sources.weak");
      }
      config.weak_sources.push_back(layout);
    }
  }
  config.etas = kv.get_doubles("sources.eta", config.etas);

  config.train.epochs = kv.get_size("train.epochs", config.train.epochs);
  config.train.batch_size = kv.get_size("train.batch_size", config.train.batch_size);
  config.train.learning_rate = kv.get_double("train.learning_rate", config.train.learning_rate);
  config.train.momentum = kv.get_double("train.momentum", config.train.momentum);
  config.train.weight_decay = kv.get_double("train.weight_decay", config.train.weight_decay);
  config.train.architecture = parse_architecture(
      kv.get_string("train.architecture", std::string(to_string(config.train.architecture))));
  config.train.hidden_dim = kv.get_size("train.hidden", config.train.hidden_dim);

  config.loss.family =
      parse_loss_family(kv.get_string("loss.family", std::string(to_string(config.loss.family))));
  config.loss.q = kv.get_double("loss.q", config.loss.q);
  config.loss.alpha = kv.get_double("loss.alpha", config.loss.alpha);
  config.loss.beta = kv.get_double("loss.beta", config.loss.beta);
  config.loss.A = kv.get_double("loss.A", config.loss.A);

  if (kv.has("experiment.combinations")) {
    config.combinations.clear();
    for (const std::string& item : kv.get_list("experiment.combinations", {})) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) {
        throw std::invalid_argument("experiment.combinations: expected strategy:loss, got '" +
                                    item + "'");
      }
      config.combinations.push_back(
          {parse_strategy(item.substr(0, colon)), parse_loss_family(item.substr(colon + 1))});
    }
  }
  config.use_clean_in_training =
      kv.get_bool("experiment.use_clean_in_training", config.use_clean_in_training);
  config.baseline_epoch_cap =
      kv.get_size("experiment.baseline_epoch_cap", config.baseline_epoch_cap);
  config.true_matrices = kv.get_bool("experiment.true_matrices", config.true_matrices);
  config.smoothing = kv.get_double("experiment.smoothing", config.smoothing);

  const auto unused = kv.unused_keys();
  if (!unused.empty()) throw std::invalid_argument("unknown config key '" + unused.front() + "'");
  config.validate();
  return config;
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw std::invalid_argument("config needs at least one seed");
  if (combinations.empty()) throw std::invalid_argument("config needs at least one combination");
  if (clean_count == 0) throw std::invalid_argument("dataset.clean_count must be positive");
  if (train.epochs == 0) throw std::invalid_argument("train.epochs must be at least 1");
  for (const WeakSourceLayout& source : weak_sources) {
    if (!(source.multiple >= 0.0)) throw std::invalid_argument("weak source multiple must be >= 0");
  }
  for (double eta : etas) {
    for (const WeakSourceLayout& source : weak_sources) {
      (void)make_template(source.kind, classes, eta);
    }
  }
  if (!use_clean_in_training && weak_sources.empty()) {
    throw std::invalid_argument("training without the clean source needs a weak source");
  }
  if (!(smoothing >= 0.0)) throw std::invalid_argument("experiment.smoothing must be >= 0");
  train.validate();
  loss.validate();
}

std::string ExperimentConfig::source_layout() const {
  std::string layout = use_clean_in_training ? "clean" : "";
  for (const WeakSourceLayout& source : weak_sources) {
    if (!layout.empty()) layout += '+';
    layout += std::string(to_string(source.kind)) + ':' + format_number(source.multiple);
  }
  return layout;
}

std::vector<SourceSpec> ExperimentConfig::source_specs(double eta) const {
  std::vector<SourceSpec> specs;
  specs.push_back({0, TransitionMatrix::identity(classes), clean_count, 1.0});
  for (std::size_t s = 0; s < weak_sources.size(); ++s) {
    const auto count = static_cast<std::size_t>(
        std::llround(weak_sources[s].multiple * static_cast<double>(clean_count)));
    specs.push_back({s + 1, make_template(weak_sources[s].kind, classes, eta), count, 1.0});
  }
  return specs;
}

const ReportRow* RunReport::find(std::string_view strategy, std::string_view loss,
                                 std::optional<double> eta) const {
  for (const ReportRow& row : rows) {
    if (row.strategy != strategy || row.loss != loss) continue;
    if (row.eta.has_value() != eta.has_value()) continue;
    if (eta && std::abs(*row.eta - *eta) > 1e-12) continue;
    return &row;
  }
  return nullptr;
}

double overall_accuracy(const ModelParameters& params, std::span<const LabeledInstance> test) {
  if (test.empty()) throw std::invalid_argument("overall_accuracy: empty test set");
  std::size_t correct = 0;
  for (const LabeledInstance& instance : test) {
    if (predict(params, instance.features) == instance.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

double mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean of an empty range");
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(values.size());
}

double unbiased_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double squares = 0.0;
  for (double v : values) squares += (v - m) * (v - m);
  return std::sqrt(squares / static_cast<double>(values.size() - 1));
}

RunReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::size_t n_seeds = config.seeds.size();
  const std::size_t n_etas = config.etas.size();
  const std::size_t n_combos = config.combinations.size();
  const std::string layout = config.source_layout();

  // Data for every (seed, eta). The clean subset and the test set depend on
  // the seed only, so one baseline per seed serves every eta.
  std::vector<Dataset> clean_data;
  std::vector<std::vector<MultisourceSplit>> splits(n_seeds);
  for (std::size_t si = 0; si < n_seeds; ++si) {
    Rng data_rng(derive_seed(config.seeds[si], kDataStream));
    clean_data.push_back(generate_blobs(config.classes, config.dim, config.per_class,
                                        config.spread, data_rng));
    const std::vector<double> etas = n_etas ? config.etas : std::vector<double>{0.0};
    for (double eta : etas) {
      const auto specs = n_etas ? config.source_specs(eta) : std::vector<SourceSpec>{
          {0, TransitionMatrix::identity(config.classes), config.clean_count, 1.0}};
      splits[si].push_back(build_multisource(clean_data[si], specs, config.seeds[si]));
    }
  }

  // Baselines.
  ReportRow baseline_row{"baseline", std::string(to_string(config.loss.family)), std::nullopt,
                         "clean", true, std::vector<SeedOutcome>(n_seeds), 0.0, 0.0};
  std::vector<std::optional<ModelParameters>> baselines(n_seeds);
  {
    std::vector<std::function<void()>> tasks;
    for (std::size_t si = 0; si < n_seeds; ++si) {
      tasks.emplace_back([&, si] {
        TrainConfig train = config.train;
        train.strategy = Strategy::Vanilla;
        train.loss = config.loss;
        train.seed = derive_seed(config.seeds[si], kBaselineStream);
        if (config.baseline_epoch_cap > 0) train.epochs = config.baseline_epoch_cap;
        SeedOutcome& outcome = baseline_row.outcomes[si];
        outcome.seed = config.seeds[si];
        const MultisourceSplit& split = splits[si].front();
        EpochTracker tracker{split.test.instances, &outcome, &baselines[si]};
        const TrainResult result = train_model(split.train.sources[0], config.classes,
                                               config.dim, train, {}, tracker);
        outcome.failed = result.diverged;
        if (!baselines[si]) baselines[si] = result.params;
      });
    }
    run_tasks(tasks, config.workers);
  }
  aggregate(baseline_row);

  RunReport report;
  report.rows.push_back(baseline_row);
  report.baseline = baselines.front();

  // Correction matrices for every (seed, eta).
  struct Matrices {
    std::vector<TransitionMatrix> per_source;  // index = source id
    std::optional<TransitionMatrix> single;
  };
  const bool needs_single =
      std::any_of(config.combinations.begin(), config.combinations.end(),
                  [](const Combination& c) { return c.strategy == Strategy::Forward; });
  std::vector<std::vector<Matrices>> matrices(n_seeds, std::vector<Matrices>(n_etas));
  std::vector<std::vector<std::vector<LabeledInstance>>> train_sets(
      n_seeds, std::vector<std::vector<LabeledInstance>>(n_etas));
  for (std::size_t si = 0; si < n_seeds; ++si) {
    for (std::size_t ei = 0; ei < n_etas; ++ei) {
      const MultisourceSplit& split = splits[si][ei];
      const std::vector<SourceSpec> specs = config.source_specs(config.etas[ei]);
      const std::vector<std::size_t> skip_clean{0};
      train_sets[si][ei] = config.use_clean_in_training
                               ? split.train.merged()
                               : split.train.merged(skip_clean);
      Matrices& m = matrices[si][ei];
      m.per_source.push_back(TransitionMatrix::identity(config.classes));
      for (std::size_t s = 1; s < specs.size(); ++s) {
        m.per_source.push_back(config.true_matrices
                                   ? specs[s].matrix
                                   : estimate_transition(
                                         confusion_counts(*baselines[si], split.train.sources[s]),
                                         config.smoothing));
      }
      if (needs_single) {
        if (config.true_matrices) {
          const std::size_t c = config.classes;
          std::vector<double> mixture(c * c, 0.0);
          double total = 0.0;
          for (std::size_t s = config.use_clean_in_training ? 0 : 1; s < specs.size(); ++s) {
            const double w = static_cast<double>(specs[s].count);
            total += w;
            for (std::size_t i = 0; i < c * c; ++i) mixture[i] += w * specs[s].matrix.entries()[i];
          }
          for (double& v : mixture) v /= total;
          m.single = TransitionMatrix(c, std::move(mixture));
        } else {
          m.single = estimate_single(*baselines[si], train_sets[si][ei], config.smoothing);
        }
      }
      report.all_estimates.emplace_back(
          estimate_key(config.seeds[si], config.etas[ei]),
          std::vector<TransitionMatrix>(m.per_source.begin() + 1, m.per_source.end()));
    }
  }
  if (n_etas > 0) {
    const Matrices& first = matrices.front().front();
    report.estimated.assign(first.per_source.begin() + 1, first.per_source.end());
    report.estimated_single = first.single;
  }

  // Main runs: rows ordered by (eta, combination), seeds inside each row.
  std::vector<ReportRow> rows;
  for (std::size_t ei = 0; ei < n_etas; ++ei) {
    bool dominance = true;
    for (const WeakSourceLayout& source : config.weak_sources) {
      dominance = dominance && satisfies_diagonal_dominance(
                                   make_template(source.kind, config.classes, config.etas[ei]));
    }
    for (const Combination& combo : config.combinations) {
      rows.push_back({std::string(to_string(combo.strategy)), std::string(to_string(combo.loss)),
                      config.etas[ei], layout, dominance,
                      std::vector<SeedOutcome>(n_seeds), 0.0, 0.0});
    }
  }
  std::vector<std::function<void()>> tasks;
  for (std::size_t ei = 0; ei < n_etas; ++ei) {
    for (std::size_t ci = 0; ci < n_combos; ++ci) {
      for (std::size_t si = 0; si < n_seeds; ++si) {
        tasks.emplace_back([&, ei, ci, si] {
          const Combination& combo = config.combinations[ci];
          TrainConfig train = config.train;
          train.strategy = combo.strategy;
          train.loss = config.loss;
          train.loss.family = combo.loss;
          // Shared by every eta and combination of a seed: runs differ only in
          // labels and strategy.
          train.seed = derive_seed(config.seeds[si], kTrainStream);
          Correction correction;
          const Matrices& m = matrices[si][ei];
          if (combo.strategy == Strategy::Proposed) correction.matrices = m.per_source;
          if (combo.strategy == Strategy::Forward) correction.matrices = {*m.single};
          SeedOutcome& outcome = rows[ei * n_combos + ci].outcomes[si];
          outcome.seed = config.seeds[si];
          EpochTracker tracker{splits[si][ei].test.instances, &outcome};
          const TrainResult result = train_model(train_sets[si][ei], config.classes, config.dim,
                                                 train, correction, tracker);
          outcome.failed = result.diverged;
        });
      }
    }
  }
  run_tasks(tasks, config.workers);
  for (ReportRow& row : rows) {
    aggregate(row);
    report.rows.push_back(std::move(row));
  }
  return report;
}

void write_report_csv(std::ostream& out, const RunReport& report) {
  out << "strategy,loss,eta,source_layout,seed,best_oa,best_epoch,mean_oa,std_oa,dominance_ok\n";
  for (const ReportRow& row : report.rows) {
    const std::string prefix =
        row.strategy + ',' + row.loss + ',' + format_eta(row.eta) + ',' + row.source_layout + ',';
    const char* dominance = row.dominance_ok ? "true" : "false";
    for (const SeedOutcome& outcome : row.outcomes) {
      out << prefix << outcome.seed << ','
          << (outcome.failed ? std::string("nan") : format_number(outcome.best_oa)) << ','
          << outcome.best_epoch << ",,," << dominance << '\n';
    }
    out << prefix << "mean,,," << format_number(row.mean_oa) << ','
        << format_number(row.std_oa) << ',' << dominance << '\n';
  }
}

void write_curves_csv(std::ostream& out, const RunReport& report) {
  out << "strategy,loss,eta,seed,epoch,oa\n";
  for (const ReportRow& row : report.rows) {
    for (const SeedOutcome& outcome : row.outcomes) {
      for (std::size_t e = 0; e < outcome.curve.size(); ++e) {
        out << row.strategy << ',' << row.loss << ',' << format_eta(row.eta) << ','
            << outcome.seed << ',' << (e + 1) << ',' << format_number(outcome.curve[e]) << '\n';
      }
    }
  }
}

void emit_csv(const RunReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_report_csv(out, report);
  if (!out) throw std::runtime_error("failed writing " + path);
}

void write_run_directory(const RunReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path root(dir);
  emit_csv(report, (root / "report.csv").string());
  {
    std::ofstream curves(root / "curves.csv");
    if (!curves) throw std::runtime_error("cannot write curves.csv in " + dir);
    write_curves_csv(curves, report);
  }
  if (report.baseline) save_parameters((root / "baseline.params").string(), *report.baseline);
  for (std::size_t i = 0; i < report.estimated.size(); ++i) {
    save_matrix((root / ("T_hat_source" + std::to_string(i + 1) + ".txt")).string(),
                report.estimated[i]);
  }
  if (report.estimated_single) {
    save_matrix((root / "T_hat_single.txt").string(), *report.estimated_single);
  }
  for (const auto& [key, estimates] : report.all_estimates) {
    const fs::path sub = root / "estimates" / key;
    fs::create_directories(sub);
    for (std::size_t i = 0; i < estimates.size(); ++i) {
      save_matrix((sub / ("T_hat_source" + std::to_string(i + 1) + ".txt")).string(),
                  estimates[i]);
    }
  }
}

}  // namespace weaklab
