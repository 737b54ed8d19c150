#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "weaklab/labelspace.hpp"
#include "weaklab/losses.hpp"

namespace weaklab {

/// Raised when the corrected probability of the given label is zero, i.e.
/// column k of T puts no mass on any class the model considers possible.
class DegenerateColumnError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Lower bound applied to target probabilities on the training path only.
inline constexpr double kTrainingProbabilityFloor = 1e-12;

/// Softmax with max-subtraction.
std::vector<double> softmax(std::span<const double> scores);

/// Gradient of u_j with respect to the scores: u_j (e^j - u).
std::vector<double> softmax_grad(std::span<const double> u, std::size_t j);

/// Corrected prediction T^T u.
std::vector<double> forward_correct(const TransitionMatrix& t, std::span<const double> u);

/// Loss of the given label k evaluated on the corrected prediction.
double corrected_loss(const LossSpec& spec, const TransitionMatrix& t, std::size_t k,
                      std::span<const double> u);

/// Gradient of corrected_loss with respect to the scores:
///   f'(ũ_k) * sum_j T[j][k] * softmax_grad(u, j)
std::vector<double> weight_proposed(const LossSpec& spec, const TransitionMatrix& t,
                                    std::size_t k, std::span<const double> u);

/// Closed form for GCE: -ũ_k^q * ((T[., k] ⊙ u) / ũ_k - u).
std::vector<double> weight_proposed_gce_closed_form(double q, const TransitionMatrix& t,
                                                    std::size_t k, std::span<const double> u);

/// Gradient of the uncorrected per-sample loss scaled by the source weight.
std::vector<double> weight_standard(const LossSpec& spec, double omega, std::size_t k,
                                    std::span<const double> u);

/// Training-path variants: the target probability is floored at
/// kTrainingProbabilityFloor instead of raising, and the result is written to
/// `out` (size c).
void weight_proposed_floored(const LossSpec& spec, const TransitionMatrix& t, std::size_t k,
                             std::span<const double> u, std::span<double> out);
void weight_standard_floored(const LossSpec& spec, double omega, std::size_t k,
                             std::span<const double> u, std::span<double> out);

/// Classes whose score a descent step raises: { j : u_j > 0 and T[j][k] > ũ_k }.
std::vector<std::size_t> optimized_classes(const TransitionMatrix& t, std::size_t k,
                                           std::span<const double> u);

/// || (T[., k] ⊙ u) / ũ_k - u ||_1, always in [0, 2].
double l1_discrepancy(const TransitionMatrix& t, std::size_t k, std::span<const double> u);

}  // namespace weaklab
