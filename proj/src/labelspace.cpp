#include "weaklab/labelspace.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace weaklab {

namespace {

struct Cell {
  std::size_t row;
  std::size_t col;
  double value;
};

// Fills a ten-class template from its off-diagonal cells; every row that has
// off-diagonal mass gets the complementary diagonal, others are identity rows.
TransitionMatrix from_off_diagonal(std::initializer_list<Cell> cells, double diagonal_loss) {
  constexpr std::size_t c = 10;
  std::vector<double> entries(c * c, 0.0);
  std::vector<bool> affected(c, false);
  for (const Cell& cell : cells) {
    entries[cell.row * c + cell.col] = cell.value;
    affected[cell.row] = true;
  }
  for (std::size_t j = 0; j < c; ++j) {
    entries[j * c + j] = affected[j] ? 1.0 - diagonal_loss : 1.0;
  }
  return TransitionMatrix(c, std::move(entries));
}

void require_ten_classes(TemplateKind kind, std::size_t classes) {
  if (classes != 10) {
    throw std::invalid_argument(std::string(to_string(kind)) +
                                " template is only defined for 10 classes");
  }
}

}  // namespace

TransitionMatrix::TransitionMatrix(std::size_t classes, std::vector<double> entries)
    : classes_(classes), entries_(std::move(entries)) {
  if (classes_ == 0) throw std::invalid_argument("transition matrix needs at least one class");
  if (entries_.size() != classes_ * classes_) {
    throw std::invalid_argument("transition matrix entry count does not match c*c");
  }
  for (std::size_t j = 0; j < classes_; ++j) {
    double sum = 0.0;
    for (double p : row(j)) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("transition matrix entry outside [0, 1] in row " +
                                    std::to_string(j));
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw std::invalid_argument("transition matrix row " + std::to_string(j) +
                                  " does not sum to 1");
    }
  }
}

TransitionMatrix TransitionMatrix::identity(std::size_t classes) {
  std::vector<double> entries(classes * classes, 0.0);
  for (std::size_t j = 0; j < classes; ++j) entries[j * classes + j] = 1.0;
  return TransitionMatrix(classes, std::move(entries));
}

std::string_view to_string(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::MixedClassDependent: return "mixed";
    case TemplateKind::Uniform: return "uniform";
    case TemplateKind::LandCoverChange: return "landcover";
    case TemplateKind::InterclassSimilarity: return "similarity";
    case TemplateKind::Identity: return "identity";
  }
  return "unknown";
}

TemplateKind parse_template_kind(std::string_view name) {
  if (name == "mixed" || name == "a") return TemplateKind::MixedClassDependent;
  if (name == "uniform" || name == "b") return TemplateKind::Uniform;
  if (name == "landcover" || name == "c") return TemplateKind::LandCoverChange;
  if (name == "similarity" || name == "d") return TemplateKind::InterclassSimilarity;
  if (name == "identity") return TemplateKind::Identity;
  throw std::invalid_argument("unknown template kind '" + std::string(name) + "'");
}

double template_eta_limit(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::MixedClassDependent: return 0.8;
    case TemplateKind::LandCoverChange: return 0.6;
    case TemplateKind::Uniform:
    case TemplateKind::InterclassSimilarity: return 1.0;
    case TemplateKind::Identity: return 0.0;
  }
  return 0.0;
}

TransitionMatrix make_template(TemplateKind kind, std::size_t classes, double eta) {
  if (kind == TemplateKind::Identity) {
    if (classes < 2) throw std::invalid_argument("identity template needs c >= 2");
    if (eta != 0.0) throw std::invalid_argument("identity template only accepts eta = 0");
    return TransitionMatrix::identity(classes);
  }
  if (!(eta >= 0.0 && eta < template_eta_limit(kind))) {
    throw std::invalid_argument("eta outside the valid range of the " +
                                std::string(to_string(kind)) + " template");
  }

  switch (kind) {
    case TemplateKind::Uniform: {
      if (classes < 2) throw std::invalid_argument("uniform template needs c >= 2");
      const double off = eta / static_cast<double>(classes - 1);
      std::vector<double> entries(classes * classes, off);
      for (std::size_t j = 0; j < classes; ++j) entries[j * classes + j] = 1.0 - eta;
      return TransitionMatrix(classes, std::move(entries));
    }
    case TemplateKind::MixedClassDependent: {
      require_ten_classes(kind, classes);
      const double one = eta / 0.8;
      const double half = eta / (2.0 * 0.8);
      return from_off_diagonal({{0, 5, half}, {0, 6, half},
                                {1, 2, one},
                                {2, 5, one},
                                {3, 0, half}, {3, 1, half},
                                {4, 5, half}, {4, 7, half},
                                {5, 2, one},
                                {6, 0, half}, {6, 5, half},
                                {7, 1, half}, {7, 4, half}},
                               one);
    }
    case TemplateKind::LandCoverChange: {
      require_ten_classes(kind, classes);
      const double one = eta / 0.6;
      const double half = eta / (2.0 * 0.6);
      const double third = eta / (3.0 * 0.6);
      return from_off_diagonal({{0, 1, half}, {0, 5, half},
                                {3, 1, half}, {3, 2, half},
                                {4, 0, third}, {4, 1, third}, {4, 5, third},
                                {5, 2, one},
                                {6, 1, half}, {6, 2, half},
                                {7, 1, third}, {7, 2, third}, {7, 5, third}},
                               one);
    }
    case TemplateKind::InterclassSimilarity: {
      require_ten_classes(kind, classes);
      const double half = eta / 2.0;
      const double third = eta / 3.0;
      return from_off_diagonal({{0, 3, third}, {0, 5, third}, {0, 6, third},
                                {1, 2, half}, {1, 3, half},
                                {2, 1, eta},
                                {3, 0, third}, {3, 1, third}, {3, 6, third},
                                {4, 7, eta},
                                {5, 0, half}, {5, 6, half},
                                {6, 0, third}, {6, 3, third}, {6, 5, third},
                                {7, 4, eta},
                                {8, 9, eta},
                                {9, 8, eta}},
                               eta);
    }
    case TemplateKind::Identity: break;
  }
  throw std::invalid_argument("unsupported template kind");
}

double balanced_error_rate(const TransitionMatrix& t) {
  double trace = 0.0;
  for (std::size_t j = 0; j < t.classes(); ++j) trace += t(j, j);
  return 1.0 - trace / static_cast<double>(t.classes());
}

double mean_row_entropy(const TransitionMatrix& t) {
  double total = 0.0;
  for (double p : t.entries()) {
    if (p > 0.0) total -= p * std::log(p);
  }
  return total / static_cast<double>(t.classes());
}

bool satisfies_diagonal_dominance(const TransitionMatrix& t) {
  for (std::size_t j = 0; j < t.classes(); ++j) {
    for (std::size_t k = 0; k < t.classes(); ++k) {
      if (k != j && !(t(j, j) > t(j, k))) return false;
    }
  }
  return true;
}

std::size_t sample_weak_label(const TransitionMatrix& t, std::size_t true_label, Rng& rng) {
  if (true_label >= t.classes()) throw std::invalid_argument("true label out of range");
  const double draw = rng.uniform();
  double cumulative = t(true_label, true_label);
  if (draw < cumulative) return true_label;
  std::size_t last_nonzero = true_label;
  for (std::size_t k = 0; k < t.classes(); ++k) {
    if (k == true_label) continue;
    const double p = t(true_label, k);
    if (p <= 0.0) continue;
    cumulative += p;
    last_nonzero = k;
    if (draw < cumulative) return k;
  }
  // Row sums may fall a few ulps short of 1.
  return last_nonzero;
}

void write_matrix(std::ostream& out, const TransitionMatrix& t) {
  const std::size_t c = t.classes();
  out << c << '\n';
  char buffer[32];
  for (std::size_t j = 0; j < c; ++j) {
    for (std::size_t k = 0; k < c; ++k) {
      std::snprintf(buffer, sizeof buffer, "%.17g", t(j, k));
      if (k > 0) out << ' ';
      out << buffer;
    }
    out << '\n';
  }
}

TransitionMatrix read_matrix(std::istream& in) {
  long long c = 0;
  if (!(in >> c) || c <= 0) throw std::runtime_error("matrix file: bad class count");
  const auto classes = static_cast<std::size_t>(c);
  std::vector<double> entries(classes * classes);
  for (double& value : entries) {
    if (!(in >> value)) throw std::runtime_error("matrix file: truncated entries");
  }
  return TransitionMatrix(classes, std::move(entries));
}

void save_matrix(const std::string& path, const TransitionMatrix& t) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_matrix(out, t);
  if (!out) throw std::runtime_error("failed writing " + path);
}

TransitionMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_matrix(in);
}

void SourceSpec::validate() const {
  if (!(weight > 0.0)) throw std::invalid_argument("source weight must be positive");
  if (id == 0 && !(matrix == TransitionMatrix::identity(matrix.classes()))) {
    throw std::invalid_argument("source 0 must carry the identity matrix");
  }
}

}  // namespace weaklab
