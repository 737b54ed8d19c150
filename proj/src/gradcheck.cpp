#include "weaklab/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "weaklab/correction.hpp"
#include "weaklab/labelspace.hpp"
#include "weaklab/losses.hpp"
#include "weaklab/model.hpp"
#include "weaklab/rng.hpp"

namespace weaklab {

namespace {

TransitionMatrix random_transition(std::size_t c, Rng& rng) {
  std::vector<double> entries(c * c);
  for (std::size_t j = 0; j < c; ++j) {
    double total = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
      entries[j * c + k] = rng.uniform(0.01, 1.0);
      total += entries[j * c + k];
    }
    for (std::size_t k = 0; k < c; ++k) entries[j * c + k] /= total;
  }
  return TransitionMatrix(c, std::move(entries));
}

bool near_relu_kink(const ModelParameters& params, std::span<const double> x) {
  if (params.architecture != Architecture::Hidden) return false;
  ForwardCache cache;
  forward_cached(params, x, cache);
  return std::any_of(cache.hidden_pre.begin(), cache.hidden_pre.end(),
                     [](double z) { return std::abs(z) < 1e-4; });
}

}  // namespace

std::vector<double> numerical_gradient(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> x, double step) {
  std::vector<double> point(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double original = point[i];
    point[i] = original + step;
    const double up = f(point);
    point[i] = original - step;
    const double down = f(point);
    point[i] = original;
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

double relative_error(std::span<const double> a, std::span<const double> b, double floor) {
  double diff = 0.0;
  double scale = floor;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return diff / scale;
}

GradientCheckSummary run_gradient_checks(std::size_t cases, std::uint64_t seed,
                                         double score_tolerance, double parameter_tolerance,
                                         std::ostream* dump) {
  constexpr std::size_t kClassCounts[] = {2, 5, 10};
  constexpr LossFamily kFamilies[] = {LossFamily::CCE, LossFamily::MAE, LossFamily::GCE,
                                      LossFamily::SL};
  Rng rng(seed);
  GradientCheckSummary summary;
  if (dump) *dump << "case,loss,c,k,component,proposed,numerical,standard\n";

  for (std::size_t n = 0; n < cases; ++n) {
    const std::size_t c = kClassCounts[n % 3];
    LossSpec spec;
    spec.family = kFamilies[(n / 3) % 4];
    const TransitionMatrix t = random_transition(c, rng);
    const std::size_t k = rng.index(c);
    std::vector<double> h(c);
    for (double& v : h) v = 1.5 * rng.normal();

    const auto u = softmax(h);
    const auto weight = weight_proposed(spec, t, k, u);
    const auto numeric = numerical_gradient(
        [&](std::span<const double> scores) { return corrected_loss(spec, t, k, softmax(scores)); },
        h);
    const double score_error = relative_error(weight, numeric);
    summary.max_score_error = std::max(summary.max_score_error, score_error);
    if (!(score_error <= score_tolerance)) ++summary.score_failures;
    if (dump) {
      const auto standard = weight_standard(spec, 1.0, k, u);
      for (std::size_t i = 0; i < c; ++i) {
        *dump << n << ',' << to_string(spec.family) << ',' << c << ',' << k << ',' << i << ','
              << weight[i] << ',' << numeric[i] << ',' << standard[i] << '\n';
      }
    }

    // End to end through a small model.
    const auto arch = n % 2 == 0 ? Architecture::Linear : Architecture::Hidden;
    const std::size_t d = 4;
    ModelParameters params = ModelParameters::glorot(arch, d, 6, c, rng);
    for (std::span<double> block : params.blocks()) {
      for (double& v : block) v += 0.1 * rng.normal();
    }
    std::vector<double> x(d);
    do {
      for (double& v : x) v = rng.normal();
    } while (near_relu_kink(params, x));

    const auto omega = weight_proposed(spec, t, k, softmax(forward(params, x)));
    const ModelParameters grads = backward(params, x, omega);
    std::vector<double> analytic;
    std::vector<double> flat;
    for (std::span<const double> block : grads.blocks()) analytic.insert(analytic.end(), block.begin(), block.end());
    for (std::span<const double> block : std::as_const(params).blocks()) flat.insert(flat.end(), block.begin(), block.end());
    const auto numeric_params = numerical_gradient(
        [&](std::span<const double> values) {
          ModelParameters probe = params;
          std::size_t offset = 0;
          for (std::span<double> block : probe.blocks()) {
            std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(offset), block.size(), block.begin());
            offset += block.size();
          }
          return corrected_loss(spec, t, k, softmax(forward(probe, x)));
        },
        flat);
    const double parameter_error = relative_error(analytic, numeric_params);
    summary.max_parameter_error = std::max(summary.max_parameter_error, parameter_error);
    if (!(parameter_error <= parameter_tolerance)) ++summary.parameter_failures;
    ++summary.cases;
  }
  return summary;
}

}  // namespace weaklab
