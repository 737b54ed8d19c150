#include "weaklab/correction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace weaklab {

namespace {

void check_dimensions(const TransitionMatrix& t, std::size_t k, std::span<const double> u) {
  if (u.size() != t.classes()) {
    throw std::invalid_argument("probability vector has " + std::to_string(u.size()) +
                                " entries, matrix has " + std::to_string(t.classes()) +
                                " classes");
  }
  if (k >= t.classes()) throw std::invalid_argument("label out of range");
}

double corrected_target(const TransitionMatrix& t, std::size_t k, std::span<const double> u) {
  double value = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) value += t(j, k) * u[j];
  return value;
}

double checked_corrected_target(const TransitionMatrix& t, std::size_t k,
                                std::span<const double> u) {
  const double value = corrected_target(t, k, u);
  if (!(value > 0.0)) {
    throw DegenerateColumnError("corrected probability of label " + std::to_string(k) +
                                " is zero");
  }
  // T^T u can exceed 1 by rounding.
  return std::min(value, 1.0);
}

// scale * sum_j column[j] * u_j (e^j - u), one softmax gradient per class.
void accumulate_weighted_softmax_grads(std::span<const double> u, const TransitionMatrix& t,
                                       std::size_t k, double scale, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  const std::size_t c = u.size();
  for (std::size_t j = 0; j < c; ++j) {
    const double weight = t(j, k) * u[j];
    if (weight == 0.0) continue;
    for (std::size_t i = 0; i < c; ++i) {
      out[i] += weight * ((i == j ? 1.0 : 0.0) - u[i]);
    }
  }
  for (double& value : out) value *= scale;
}

}  // namespace

std::vector<double> softmax(std::span<const double> scores) {
  if (scores.empty()) return {};
  const double top = *std::max_element(scores.begin(), scores.end());
  std::vector<double> u(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    u[i] = std::exp(scores[i] - top);
    total += u[i];
  }
  for (double& value : u) value /= total;
  return u;
}

std::vector<double> softmax_grad(std::span<const double> u, std::size_t j) {
  if (j >= u.size()) throw std::invalid_argument("class index out of range");
  std::vector<double> grad(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    grad[i] = u[j] * ((i == j ? 1.0 : 0.0) - u[i]);
  }
  return grad;
}

std::vector<double> forward_correct(const TransitionMatrix& t, std::span<const double> u) {
  if (u.size() != t.classes()) throw std::invalid_argument("dimension mismatch in forward_correct");
  std::vector<double> corrected(u.size(), 0.0);
  for (std::size_t j = 0; j < u.size(); ++j) {
    for (std::size_t k = 0; k < u.size(); ++k) corrected[k] += t(j, k) * u[j];
  }
  return corrected;
}

double corrected_loss(const LossSpec& spec, const TransitionMatrix& t, std::size_t k,
                      std::span<const double> u) {
  check_dimensions(t, k, u);
  return loss_value(spec, checked_corrected_target(t, k, u));
}

std::vector<double> weight_proposed(const LossSpec& spec, const TransitionMatrix& t,
                                    std::size_t k, std::span<const double> u) {
  check_dimensions(t, k, u);
  const double target = checked_corrected_target(t, k, u);
  std::vector<double> weight(u.size());
  accumulate_weighted_softmax_grads(u, t, k, loss_derivative(spec, target), weight);
  return weight;
}

std::vector<double> weight_proposed_gce_closed_form(double q, const TransitionMatrix& t,
                                                    std::size_t k, std::span<const double> u) {
  check_dimensions(t, k, u);
  const double target = checked_corrected_target(t, k, u);
  const double scale = -std::pow(target, q);
  std::vector<double> weight(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    weight[i] = scale * (t(i, k) * u[i] / target - u[i]);
  }
  return weight;
}

std::vector<double> weight_standard(const LossSpec& spec, double omega, std::size_t k,
                                    std::span<const double> u) {
  if (k >= u.size()) throw std::invalid_argument("label out of range");
  std::vector<double> weight = softmax_grad(u, k);
  const double scale = loss_derivative(spec, std::min(u[k], 1.0)) * omega;
  for (double& value : weight) value *= scale;
  return weight;
}

void weight_proposed_floored(const LossSpec& spec, const TransitionMatrix& t, std::size_t k,
                             std::span<const double> u, std::span<double> out) {
  const double target =
      std::clamp(corrected_target(t, k, u), kTrainingProbabilityFloor, 1.0);
  accumulate_weighted_softmax_grads(u, t, k, loss_derivative(spec, target), out);
}

void weight_standard_floored(const LossSpec& spec, double omega, std::size_t k,
                             std::span<const double> u, std::span<double> out) {
  const double target = std::clamp(u[k], kTrainingProbabilityFloor, 1.0);
  const double scale = loss_derivative(spec, target) * omega * u[k];
  for (std::size_t i = 0; i < u.size(); ++i) {
    out[i] = scale * ((i == k ? 1.0 : 0.0) - u[i]);
  }
}

std::vector<std::size_t> optimized_classes(const TransitionMatrix& t, std::size_t k,
                                           std::span<const double> u) {
  check_dimensions(t, k, u);
  const double target = corrected_target(t, k, u);
  std::vector<std::size_t> classes;
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (u[j] > 0.0 && t(j, k) > target) classes.push_back(j);
  }
  return classes;
}

double l1_discrepancy(const TransitionMatrix& t, std::size_t k, std::span<const double> u) {
  check_dimensions(t, k, u);
  const double target = checked_corrected_target(t, k, u);
  double norm = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) norm += std::abs(t(j, k) * u[j] / target - u[j]);
  return norm;
}

}  // namespace weaklab
