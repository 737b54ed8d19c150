#pragma once

#include <string_view>

namespace weaklab {

enum class LossFamily { CCE, MAE, GCE, SL };

std::string_view to_string(LossFamily family);
LossFamily parse_loss_family(std::string_view name);

/// Loss selector. Every supported loss depends on the prediction only
/// through the probability of the target class.
struct LossSpec {
  LossFamily family = LossFamily::CCE;
  double q = 0.7;      // GCE exponent, (0, 1]
  double alpha = 1.0;  // SL cross-entropy weight, > 0
  double beta = 1.0;   // SL reverse term weight, > 0
  double A = -4.0;     // SL log(0) surrogate, < 0

  void validate() const;
};

/// Loss as a function of the target-class probability uk in (0, 1].
/// Throws std::domain_error for uk outside (0, 1].
double loss_value(const LossSpec& spec, double uk);

/// d loss / d uk. Negative on (0, 1] for every family.
double loss_derivative(const LossSpec& spec, double uk);

}  // namespace weaklab
