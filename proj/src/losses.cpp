#include "weaklab/losses.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace weaklab {

namespace {

void check_probability(double uk) {
  if (!(uk > 0.0 && uk <= 1.0)) {
    throw std::domain_error("target probability must lie in (0, 1], got " + std::to_string(uk));
  }
}

}  // namespace

std::string_view to_string(LossFamily family) {
  switch (family) {
    case LossFamily::CCE: return "cce";
    case LossFamily::MAE: return "mae";
    case LossFamily::GCE: return "gce";
    case LossFamily::SL: return "sl";
  }
  return "unknown";
}

LossFamily parse_loss_family(std::string_view name) {
  if (name == "cce" || name == "CCE") return LossFamily::CCE;
  if (name == "mae" || name == "MAE") return LossFamily::MAE;
  if (name == "gce" || name == "GCE") return LossFamily::GCE;
  if (name == "sl" || name == "SL") return LossFamily::SL;
  throw std::invalid_argument("unknown loss family '" + std::string(name) + "'");
}

void LossSpec::validate() const {
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("loss.q must lie in (0, 1]");
  if (!(alpha > 0.0)) throw std::invalid_argument("loss.alpha must be positive");
  if (!(beta > 0.0)) throw std::invalid_argument("loss.beta must be positive");
  if (!(A < 0.0)) throw std::invalid_argument("loss.A must be negative");
}

double loss_value(const LossSpec& spec, double uk) {
  check_probability(uk);
  switch (spec.family) {
    case LossFamily::CCE: return -std::log(uk);
    case LossFamily::MAE: return 2.0 * (1.0 - uk);
    case LossFamily::GCE: return (1.0 - std::pow(uk, spec.q)) / spec.q;
    case LossFamily::SL:
      return spec.alpha * -std::log(uk) + spec.beta * (spec.A / -2.0) * 2.0 * (1.0 - uk);
  }
  throw std::invalid_argument("unknown loss family");
}

double loss_derivative(const LossSpec& spec, double uk) {
  check_probability(uk);
  switch (spec.family) {
    case LossFamily::CCE: return -1.0 / uk;
    case LossFamily::MAE: return -2.0;
    case LossFamily::GCE: return -std::pow(uk, spec.q - 1.0);
    case LossFamily::SL: return -spec.alpha / uk + spec.beta * spec.A;
  }
  throw std::invalid_argument("unknown loss family");
}

}  // namespace weaklab
