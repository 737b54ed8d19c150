#include "weaklab/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace weaklab {

std::size_t MultisourceDataset::total_size() const {
  std::size_t total = 0;
  for (const auto& source : sources) total += source.size();
  return total;
}

std::vector<LabeledInstance> MultisourceDataset::merged(std::span<const std::size_t> skip) const {
  std::vector<LabeledInstance> out;
  out.reserve(total_size());
  for (std::size_t s = 0; s < sources.size(); ++s) {
    if (std::find(skip.begin(), skip.end(), s) != skip.end()) continue;
    out.insert(out.end(), sources[s].begin(), sources[s].end());
  }
  return out;
}

Dataset generate_blobs(std::size_t classes, std::size_t dim, std::size_t n_per_class,
                       double spread, Rng& rng) {
  if (classes < 2 || dim < 2 || n_per_class < 1 || !(spread > 0.0)) {
    throw std::invalid_argument("generate_blobs: need c >= 2, d >= 2, n >= 1, spread > 0");
  }
  std::vector<std::vector<double>> means(classes, std::vector<double>(dim, 0.0));
  if (classes <= dim) {
    for (std::size_t j = 0; j < classes; ++j) means[j][j] = 1.0;
  } else {
    for (auto& mean : means) {
      double norm = 0.0;
      while (norm < 1e-12) {
        norm = 0.0;
        for (double& v : mean) {
          v = rng.normal();
          norm += v * v;
        }
      }
      norm = std::sqrt(norm);
      for (double& v : mean) v /= norm;
    }
  }

  Dataset data{classes, dim, {}};
  data.instances.reserve(classes * n_per_class);
  for (std::size_t j = 0; j < classes; ++j) {
    for (std::size_t i = 0; i < n_per_class; ++i) {
      LabeledInstance instance{std::vector<double>(dim), j, 0};
      for (std::size_t f = 0; f < dim; ++f) {
        instance.features[f] = means[j][f] + spread * rng.normal();
      }
      data.instances.push_back(std::move(instance));
    }
  }
  return data;
}

MultisourceSplit build_multisource(const Dataset& clean, std::span<const SourceSpec> specs,
                                   std::uint64_t seed) {
  if (specs.empty()) throw std::invalid_argument("build_multisource: no sources given");
  for (std::size_t s = 0; s < specs.size(); ++s) {
    specs[s].validate();
    if (specs[s].id != s) throw std::invalid_argument("source ids must be 0..S in order");
    if (specs[s].matrix.classes() != clean.classes) {
      throw std::invalid_argument("source matrix class count does not match the dataset");
    }
  }

  const std::size_t m = clean.instances.size();
  const std::size_t m_test = m / 5;
  const std::size_t m_train = m - m_test;
  std::size_t requested = 0;
  for (const SourceSpec& spec : specs) requested += spec.count;
  if (requested > m_train) {
    throw std::invalid_argument("build_multisource: sources request " + std::to_string(requested) +
                                " instances but the training pool holds " +
                                std::to_string(m_train));
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng(derive_seed(seed, 0));
  shuffle_rng.shuffle(std::span<std::size_t>(order));

  MultisourceSplit split;
  split.train.classes = clean.classes;
  split.train.dim = clean.dim;
  split.test.classes = clean.classes;
  split.test.dim = clean.dim;

  std::size_t cursor = 0;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    Rng label_rng(derive_seed(seed, 1 + s));
    std::vector<LabeledInstance> instances;
    std::vector<std::size_t> origin;
    instances.reserve(specs[s].count);
    origin.reserve(specs[s].count);
    for (std::size_t i = 0; i < specs[s].count; ++i, ++cursor) {
      const LabeledInstance& source = clean.instances[order[cursor]];
      LabeledInstance instance{source.features, source.label, s};
      if (s > 0) instance.label = sample_weak_label(specs[s].matrix, source.label, label_rng);
      instances.push_back(std::move(instance));
      origin.push_back(order[cursor]);
    }
    split.train.sources.push_back(std::move(instances));
    split.train.origin.push_back(std::move(origin));
  }

  for (std::size_t i = m_train; i < m; ++i) {
    LabeledInstance instance = clean.instances[order[i]];
    instance.source_id = 0;
    split.test.instances.push_back(std::move(instance));
    split.test_origin.push_back(order[i]);
  }
  return split;
}

std::vector<std::vector<double>> corruption_report(const MultisourceDataset& ms,
                                                   const Dataset& original) {
  const std::size_t c = ms.classes;
  std::vector<std::vector<double>> reports;
  for (std::size_t s = 0; s < ms.sources.size(); ++s) {
    std::vector<double> counts(c * c, 0.0);
    for (std::size_t i = 0; i < ms.sources[s].size(); ++i) {
      const std::size_t truth = original.instances.at(ms.origin[s][i]).label;
      counts[truth * c + ms.sources[s][i].label] += 1.0;
    }
    for (std::size_t j = 0; j < c; ++j) {
      double total = 0.0;
      for (std::size_t k = 0; k < c; ++k) total += counts[j * c + k];
      if (total > 0.0) {
        for (std::size_t k = 0; k < c; ++k) counts[j * c + k] /= total;
      }
    }
    reports.push_back(std::move(counts));
  }
  return reports;
}

void write_dataset(std::ostream& out, const Dataset& data) {
  out << data.classes << ' ' << data.dim << ' ' << data.instances.size() << '\n';
  char buffer[32];
  for (const LabeledInstance& instance : data.instances) {
    out << instance.source_id << ' ' << instance.label;
    for (double v : instance.features) {
      std::snprintf(buffer, sizeof buffer, "%.17g", v);
      out << ' ' << buffer;
    }
    out << '\n';
  }
}

Dataset read_dataset(std::istream& in) {
  Dataset data;
  std::size_t n = 0;
  if (!(in >> data.classes >> data.dim >> n)) throw std::runtime_error("dataset: bad header");
  data.instances.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    LabeledInstance instance{std::vector<double>(data.dim), 0, 0};
    if (!(in >> instance.source_id >> instance.label)) {
      throw std::runtime_error("dataset: truncated at instance " + std::to_string(i));
    }
    if (instance.label >= data.classes) {
      throw std::runtime_error("dataset: label out of range at instance " + std::to_string(i));
    }
    for (double& v : instance.features) {
      if (!(in >> v)) throw std::runtime_error("dataset: truncated features at instance " +
                                               std::to_string(i));
    }
    data.instances.push_back(std::move(instance));
  }
  return data;
}

void save_dataset(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_dataset(out, data);
  if (!out) throw std::runtime_error("failed writing " + path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_dataset(in);
}

}  // namespace weaklab
