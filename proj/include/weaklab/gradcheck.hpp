#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace weaklab {

/// Central finite-difference gradient of f at x.
std::vector<double> numerical_gradient(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> x, double step = 1e-6);

/// max_i |a_i - b_i| / max(max_i |b_i|, floor).
double relative_error(std::span<const double> a, std::span<const double> b, double floor = 1e-3);

struct GradientCheckSummary {
  std::size_t cases = 0;
  double max_score_error = 0.0;      // weight vectors vs score-space differences
  double max_parameter_error = 0.0;  // backward vs parameter-space differences
  std::size_t score_failures = 0;
  std::size_t parameter_failures = 0;

  bool passed() const { return score_failures == 0 && parameter_failures == 0; }
};

/// Random cases over every loss family, c in {2, 5, 10} and both
/// architectures. `dump` (optional) receives one CSV line per weight component.
GradientCheckSummary run_gradient_checks(std::size_t cases, std::uint64_t seed,
                                         double score_tolerance = 1e-6,
                                         double parameter_tolerance = 1e-5,
                                         std::ostream* dump = nullptr);

}  // namespace weaklab
