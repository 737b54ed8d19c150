// weaklab: multisource weak-label training experiments.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "weaklab/config.hpp"
#include "weaklab/datagen.hpp"
#include "weaklab/gradcheck.hpp"
#include "weaklab/harness.hpp"
#include "weaklab/labelspace.hpp"

namespace {

using namespace weaklab;

int run_command(const std::string& config_path, const std::string& out_dir, std::size_t jobs) {
  ExperimentConfig config = ExperimentConfig::from_config(KeyValueConfig::load(config_path));
  if (jobs > 0) config.workers = jobs;
  const RunReport report = run_experiment(config);
  write_run_directory(report, out_dir);
  for (const ReportRow& row : report.rows) {
    std::printf("%-9s %-4s eta=%-4s mean_oa=%.4f std=%.4f%s\n", row.strategy.c_str(),
                row.loss.c_str(), row.eta ? std::to_string(*row.eta).substr(0, 4).c_str() : "-",
                row.mean_oa, row.std_oa, row.dominance_ok ? "" : "  (dominance violated)");
  }
  return 0;
}

int gen_template_command(const std::string& kind, double eta, std::size_t classes,
                         const std::string& out_path) {
  const TransitionMatrix t = make_template(parse_template_kind(kind), classes, eta);
  if (out_path.empty()) {
    write_matrix(std::cout, t);
  } else {
    save_matrix(out_path, t);
  }
  std::fprintf(stderr, "balanced_error_rate=%.6g mean_row_entropy=%.6g diagonal_dominance=%s\n",
               balanced_error_rate(t), mean_row_entropy(t),
               satisfies_diagonal_dominance(t) ? "yes" : "no");
  return 0;
}

int validate_command(std::size_t cases, std::uint64_t seed, const std::string& dump_path) {
  std::ofstream dump;
  if (!dump_path.empty()) {
    dump.open(dump_path);
    if (!dump) throw std::runtime_error("cannot open " + dump_path);
  }
  const GradientCheckSummary summary =
      run_gradient_checks(cases, seed, 1e-6, 1e-5, dump_path.empty() ? nullptr : &dump);
  std::printf("cases=%zu max_score_error=%.3g max_parameter_error=%.3g failures=%zu/%zu\n",
              summary.cases, summary.max_score_error, summary.max_parameter_error,
              summary.score_failures, summary.parameter_failures);
  std::printf("%s\n", summary.passed() ? "PASS" : "FAIL");
  return summary.passed() ? 0 : 1;
}

// Spec file keys: seed, clean_count, weak = kind:eta:count ..., weak_matrix = path:count ...
int corrupt_command(const std::string& dataset_path, const std::string& spec_path,
                    const std::string& emit_path, const std::string& test_path) {
  const Dataset clean = load_dataset(dataset_path);
  const KeyValueConfig kv = KeyValueConfig::load(spec_path);
  const std::uint64_t seed = kv.get_size("seed", 0);
  std::vector<SourceSpec> specs;
  specs.push_back({0, TransitionMatrix::identity(clean.classes), kv.get_size("clean_count", 0), 1.0});
  for (const std::string& item : kv.get_list("weak", {})) {
    const auto first = item.find(':');
    const auto second = item.find(':', first == std::string::npos ? first : first + 1);
    if (first == std::string::npos || second == std::string::npos) {
      throw std::invalid_argument("weak: expected kind:eta:count, got '" + item + "'");
    }
    specs.push_back({specs.size(),
                     make_template(parse_template_kind(item.substr(0, first)), clean.classes,
                                   parse_double(item.substr(first + 1, second - first - 1), "weak")),
                     parse_size(item.substr(second + 1), "weak"), 1.0});
  }
  for (const std::string& item : kv.get_list("weak_matrix", {})) {
    const auto colon = item.rfind(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("weak_matrix: expected path:count, got '" + item + "'");
    }
    specs.push_back({specs.size(), load_matrix(item.substr(0, colon)),
                     parse_size(item.substr(colon + 1), "weak_matrix"), 1.0});
  }
  const auto unused = kv.unused_keys();
  if (!unused.empty()) throw std::invalid_argument("unknown spec key '" + unused.front() + "'");

  const MultisourceSplit split = build_multisource(clean, specs, seed);
  const auto report = corruption_report(split.train, clean);
  for (std::size_t s = 0; s < report.size(); ++s) {
    std::printf("# source %zu (%zu instances): empirical flip matrix\n", s,
                split.train.sources[s].size());
    for (std::size_t j = 0; j < clean.classes; ++j) {
      for (std::size_t k = 0; k < clean.classes; ++k) {
        std::printf(k ? " %.4f" : "%.4f", report[s][j * clean.classes + k]);
      }
      std::printf("\n");
    }
  }
  if (!emit_path.empty()) {
    save_dataset(emit_path, Dataset{clean.classes, clean.dim, split.train.merged()});
  }
  if (!test_path.empty()) save_dataset(test_path, split.test);
  return 0;
}

int blobs_command(std::size_t classes, std::size_t dim, std::size_t per_class, double spread,
                  std::uint64_t seed, const std::string& emit_path) {
  Rng rng(seed);
  const Dataset data = generate_blobs(classes, dim, per_class, spread, rng);
  if (emit_path.empty()) {
    write_dataset(std::cout, data);
  } else {
    save_dataset(emit_path, data);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multisource weak-label training with transition-matrix loss correction"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::size_t jobs = 0;
  auto* run = app.add_subcommand("run", "Run an experiment sweep and write a run directory");
  run->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Run directory")->required();
  run->add_option("--jobs", jobs, "Worker threads (overrides the config)");

  std::string kind;
  double eta = 0.0;
  std::size_t classes = 10;
  std::string template_out;
  auto* gen = app.add_subcommand("gen-template", "Print a transition-matrix template");
  gen->add_option("--kind", kind, "mixed | uniform | landcover | similarity | identity")->required();
  gen->add_option("--eta", eta, "Balanced error rate")->required();
  gen->add_option("--classes", classes, "Class count");
  gen->add_option("--out", template_out, "Write to a file instead of stdout");

  std::size_t cases = 1000;
  std::uint64_t check_seed = 1;
  std::string dump_path;
  auto* validate = app.add_subcommand("validate-gradients",
                                      "Compare analytic gradients with finite differences");
  validate->add_option("--cases", cases, "Number of random cases");
  validate->add_option("--seed", check_seed, "Random seed");
  validate->add_option("--dump", dump_path, "CSV dump of the weight vectors");

  std::string dataset_path, spec_path, emit_path, test_path;
  auto* corrupt = app.add_subcommand("corrupt", "Build a multisource weak-label dataset");
  corrupt->add_option("--load-dataset", dataset_path, "Clean dataset file")->required()->check(CLI::ExistingFile);
  corrupt->add_option("--spec", spec_path, "Source spec file")->required()->check(CLI::ExistingFile);
  corrupt->add_option("--emit-dataset", emit_path, "Write the multisource training set");
  corrupt->add_option("--emit-test", test_path, "Write the held-out test set");

  std::size_t blob_classes = 10, blob_dim = 16, per_class = 1000;
  double spread = kDefaultSpread;
  std::uint64_t blob_seed = 1;
  std::string blob_out;
  auto* blobs = app.add_subcommand("blobs", "Generate a clean Gaussian-blob dataset");
  blobs->add_option("--classes", blob_classes, "Class count");
  blobs->add_option("--dim", blob_dim, "Feature dimension");
  blobs->add_option("--per-class", per_class, "Instances per class");
  blobs->add_option("--spread", spread, "Feature standard deviation");
  blobs->add_option("--seed", blob_seed, "Random seed");
  blobs->add_option("--emit-dataset", blob_out, "Output file (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(config_path, out_dir, jobs);
    if (*gen) return gen_template_command(kind, eta, classes, template_out);
    if (*validate) return validate_command(cases, check_seed, dump_path);
    if (*corrupt) return corrupt_command(dataset_path, spec_path, emit_path, test_path);
    if (*blobs) return blobs_command(blob_classes, blob_dim, per_class, spread, blob_seed, blob_out);
  } catch (const std::exception& error) {
    std::fprintf(stderr, "weaklab: %s\n", error.what());
    return 2;
  }
  return 0;
}
