#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "weaklab/labelspace.hpp"
#include "weaklab/rng.hpp"

namespace weaklab {

struct LabeledInstance {
  std::vector<double> features;
  std::size_t label = 0;
  std::size_t source_id = 0;

  friend bool operator==(const LabeledInstance&, const LabeledInstance&) = default;
};

/// A flat list of instances with a shared label space and feature width.
struct Dataset {
  std::size_t classes = 0;
  std::size_t dim = 0;
  std::vector<LabeledInstance> instances;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Per-source training sets. origin[s][i] is the index in the clean dataset
/// that instance i of source s was drawn from.
struct MultisourceDataset {
  std::size_t classes = 0;
  std::size_t dim = 0;
  std::vector<std::vector<LabeledInstance>> sources;
  std::vector<std::vector<std::size_t>> origin;

  std::size_t total_size() const;
  /// Union of the sources in source order. Sources listed in `skip` are left out.
  std::vector<LabeledInstance> merged(std::span<const std::size_t> skip = {}) const;
};

struct MultisourceSplit {
  MultisourceDataset train;
  Dataset test;
  std::vector<std::size_t> test_origin;
};

/// Isotropic Gaussian blobs, n_per_class instances per class, ordered by
/// class. When c <= d the class means are the scaled unit axes (a regular
/// simplex with unit edge ratio sqrt(2)); otherwise they are drawn uniformly
/// on the unit sphere from `rng`. Features are mean + spread * N(0, I).
Dataset generate_blobs(std::size_t classes, std::size_t dim, std::size_t n_per_class,
                       double spread, Rng& rng);

/// Multisource weak-label generation. Shuffles D with `seed`, keeps the
/// first ceil(0.8 m) instances as the training pool and the remaining
/// floor(0.2 m) as the test set, then hands consecutive, disjoint chunks of
/// the pool to the sources in order. Labels of sources s >= 1 are resampled
/// from their transition matrix with a stream derived from (seed, s).
/// specs[0] must be the clean source; throws std::invalid_argument when the
/// requested counts exceed the training pool.
MultisourceSplit build_multisource(const Dataset& clean, std::span<const SourceSpec> specs,
                                   std::uint64_t seed);

/// Row-normalized counts of (original label -> assigned label) per source.
/// Rows with no instances are left at zero.
std::vector<std::vector<double>> corruption_report(const MultisourceDataset& ms,
                                                   const Dataset& original);

/// Text format: header `c d n`, then one `source_id label f_1 ... f_d` line
/// per instance.
void write_dataset(std::ostream& out, const Dataset& data);
Dataset read_dataset(std::istream& in);
void save_dataset(const std::string& path, const Dataset& data);
Dataset load_dataset(const std::string& path);

}  // namespace weaklab
