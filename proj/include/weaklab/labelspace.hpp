#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "weaklab/rng.hpp"

namespace weaklab {

/// Row-stochastic c x c matrix of label-flip probabilities.
/// Entry (j, k) is p(weak label k | true label j).
class TransitionMatrix {
 public:
  static constexpr double kRowSumTolerance = 1e-9;

  /// Validates shape, entry range and row sums; throws std::invalid_argument.
  TransitionMatrix(std::size_t classes, std::vector<double> entries);

  static TransitionMatrix identity(std::size_t classes);

  std::size_t classes() const { return classes_; }
  double operator()(std::size_t j, std::size_t k) const { return entries_[j * classes_ + k]; }
  std::span<const double> row(std::size_t j) const {
    return {entries_.data() + j * classes_, classes_};
  }
  const std::vector<double>& entries() const { return entries_; }

  friend bool operator==(const TransitionMatrix&, const TransitionMatrix&) = default;

 private:
  std::size_t classes_;
  std::vector<double> entries_;
};

/// Noise layouts. The class-dependent ones are ten-class layouts whose rows
/// follow the land-cover order Annual Crop, Forest, Herbaceous Vegetation,
/// Highway, Industrial, Pasture, Permanent Crop, Residential, River, Sea & Lake.
enum class TemplateKind {
  MixedClassDependent,   // similarity + land-cover change, rows 9-10 untouched
  Uniform,               // flips spread evenly over all other classes
  LandCoverChange,       // obsolete-map changes on six classes
  InterclassSimilarity,  // confusions between look-alike neighbours
  Identity,
};

std::string_view to_string(TemplateKind kind);
/// Accepts the names produced by to_string plus the short aliases a-d.
TemplateKind parse_template_kind(std::string_view name);

/// Largest error rate (exclusive) a template accepts before a diagonal
/// entry would reach zero or go negative.
double template_eta_limit(TemplateKind kind);

/// Builds the template at balanced error rate eta.
/// Throws std::invalid_argument for an unsupported class count or an eta
/// outside [0, template_eta_limit(kind)). Identity only accepts eta = 0.
TransitionMatrix make_template(TemplateKind kind, std::size_t classes, double eta);

/// 1 - mean of the diagonal.
double balanced_error_rate(const TransitionMatrix& t);

/// Mean Shannon entropy of the rows in nats (0 ln 0 = 0).
double mean_row_entropy(const TransitionMatrix& t);

/// Strict diagonal dominance of every row: T[j][j] > T[j][k] for all k != j.
bool satisfies_diagonal_dominance(const TransitionMatrix& t);

/// Draws a weak label from row `true_label`. The diagonal is tested first and
/// the remaining classes in index order, so for a fixed uniform draw the set
/// of flipped labels only grows as the diagonal shrinks.
std::size_t sample_weak_label(const TransitionMatrix& t, std::size_t true_label, Rng& rng);

/// Plain-text format: first line `c`, then c lines of c probabilities.
void write_matrix(std::ostream& out, const TransitionMatrix& t);
TransitionMatrix read_matrix(std::istream& in);
void save_matrix(const std::string& path, const TransitionMatrix& t);
TransitionMatrix load_matrix(const std::string& path);

/// A labeling source. Source 0 is the clean one and carries the identity.
struct SourceSpec {
  std::size_t id = 0;
  TransitionMatrix matrix = TransitionMatrix::identity(2);
  std::size_t count = 0;
  double weight = 1.0;

  /// Throws std::invalid_argument when the invariants do not hold.
  void validate() const;
};

}  // namespace weaklab
