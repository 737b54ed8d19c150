#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "weaklab/labelspace.hpp"

using namespace weaklab;

namespace {

constexpr TemplateKind kTenClassKinds[] = {
    TemplateKind::MixedClassDependent, TemplateKind::Uniform, TemplateKind::LandCoverChange,
    TemplateKind::InterclassSimilarity};

double max_abs_diff(const TransitionMatrix& a, const TransitionMatrix& b) {
  double diff = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i) {
    diff = std::max(diff, std::abs(a.entries()[i] - b.entries()[i]));
  }
  return diff;
}

}  // namespace

TEST_CASE("transition matrix rejects invalid input") {
  CHECK_THROWS_AS(TransitionMatrix(2, {0.5, 0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(TransitionMatrix(2, {0.5, 0.6, 0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(TransitionMatrix(2, {1.2, -0.2, 0.0, 1.0}), std::invalid_argument);
  CHECK_NOTHROW(TransitionMatrix(2, {0.5, 0.5 + 1e-10, 0.0, 1.0}));
}

TEST_CASE("uniform template at eta 0.2") {
  const TransitionMatrix t = make_template(TemplateKind::Uniform, 10, 0.2);
  for (std::size_t j = 0; j < 10; ++j) {
    for (std::size_t k = 0; k < 10; ++k) {
      CHECK(t(j, k) == doctest::Approx(j == k ? 0.8 : 0.2 / 9.0).epsilon(1e-15));
    }
  }
}

TEST_CASE("identity template") {
  CHECK(make_template(TemplateKind::Identity, 5, 0.0) == TransitionMatrix::identity(5));
  CHECK_THROWS(make_template(TemplateKind::Identity, 5, 0.1));
}

TEST_CASE("mixed class-dependent template layout") {
  const TransitionMatrix t = make_template(TemplateKind::MixedClassDependent, 10, 0.4);
  for (std::size_t j = 0; j < 8; ++j) CHECK(t(j, j) == doctest::Approx(0.5));
  CHECK(t(1, 2) == doctest::Approx(0.5));
  CHECK(t(2, 5) == doctest::Approx(0.5));
  CHECK(t(5, 2) == doctest::Approx(0.5));
  CHECK(t(0, 5) == doctest::Approx(0.25));
  CHECK(t(7, 4) == doctest::Approx(0.25));
  // water classes untouched
  CHECK(t(8, 8) == 1.0);
  CHECK(t(9, 9) == 1.0);
}

TEST_CASE("land-cover and similarity templates") {
  const TransitionMatrix c = make_template(TemplateKind::LandCoverChange, 10, 0.3);
  for (std::size_t j : {1, 2, 8, 9}) CHECK(c(j, j) == 1.0);
  CHECK(c(5, 2) == doctest::Approx(0.5));
  CHECK(c(4, 0) == doctest::Approx(0.3 / 1.8));

  const TransitionMatrix d = make_template(TemplateKind::InterclassSimilarity, 10, 0.3);
  for (std::size_t j = 0; j < 10; ++j) CHECK(d(j, j) == doctest::Approx(0.7));
  CHECK(d(8, 9) == doctest::Approx(0.3));
  CHECK(d(1, 3) == doctest::Approx(0.15));
}

TEST_CASE("template domain errors") {
  CHECK_THROWS(make_template(TemplateKind::MixedClassDependent, 10, 0.8));
  CHECK_THROWS(make_template(TemplateKind::LandCoverChange, 10, 0.6));
  CHECK_THROWS(make_template(TemplateKind::Uniform, 10, 1.0));
  CHECK_THROWS(make_template(TemplateKind::InterclassSimilarity, 10, -0.1));
  CHECK_THROWS(make_template(TemplateKind::MixedClassDependent, 9, 0.2));
  CHECK_THROWS(make_template(TemplateKind::LandCoverChange, 11, 0.2));
  CHECK_NOTHROW(make_template(TemplateKind::Uniform, 3, 0.5));
  CHECK_NOTHROW(make_template(TemplateKind::MixedClassDependent, 10, 0.7999));
}

TEST_CASE("templates are row-stochastic with the requested error rate over an eta grid") {
  for (TemplateKind kind : kTenClassKinds) {
    const double limit = template_eta_limit(kind);
    for (int i = 0; i < 200; ++i) {
      const double eta = limit * i / 200.0;
      const TransitionMatrix t = make_template(kind, 10, eta);  // validates rows
      CHECK(std::abs(balanced_error_rate(t) - eta) <= 1e-12);
    }
  }
  for (std::size_t c : {2, 3, 7, 25}) {
    CHECK(std::abs(balanced_error_rate(make_template(TemplateKind::Uniform, c, 0.37)) - 0.37) <= 1e-12);
  }
}

TEST_CASE("balanced error rate examples") {
  CHECK(balanced_error_rate(TransitionMatrix::identity(4)) == 0.0);
  CHECK(balanced_error_rate(make_template(TemplateKind::Uniform, 10, 0.3)) == doctest::Approx(0.3));
  // 8 rows at 0.5, 2 rows at 1: 1 - (8 * 0.5 + 2) / 10
  CHECK(balanced_error_rate(make_template(TemplateKind::MixedClassDependent, 10, 0.4)) ==
        doctest::Approx(0.4));
}

TEST_CASE("mean row entropy") {
  CHECK(mean_row_entropy(TransitionMatrix::identity(6)) == 0.0);
  const double expected = -0.5 * std::log(0.5) - 9.0 * (0.5 / 9.0) * std::log(0.5 / 9.0);
  CHECK(mean_row_entropy(make_template(TemplateKind::Uniform, 10, 0.5)) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(1.792).epsilon(1e-3));

  for (double eta : {0.1, 0.2, 0.3, 0.4, 0.5}) {
    CHECK(mean_row_entropy(make_template(TemplateKind::Uniform, 10, eta)) >
          mean_row_entropy(make_template(TemplateKind::MixedClassDependent, 10, eta)));
  }
}

TEST_CASE("entropy is zero exactly for one-hot rows") {
  // a permutation is one-hot in every row
  std::vector<double> perm(9, 0.0);
  perm[0 * 3 + 2] = perm[1 * 3 + 0] = perm[2 * 3 + 1] = 1.0;
  CHECK(mean_row_entropy(TransitionMatrix(3, perm)) == 0.0);
  CHECK(mean_row_entropy(TransitionMatrix(2, {1.0, 0.0, 1e-9, 1.0 - 1e-9})) > 0.0);
}

TEST_CASE("diagonal dominance flips where each template's rows tie") {
  CHECK(satisfies_diagonal_dominance(TransitionMatrix::identity(3)));
  CHECK(satisfies_diagonal_dominance(make_template(TemplateKind::MixedClassDependent, 10, 0.39)));
  CHECK_FALSE(satisfies_diagonal_dominance(make_template(TemplateKind::MixedClassDependent, 10, 0.40)));
  CHECK(satisfies_diagonal_dominance(make_template(TemplateKind::Uniform, 10, 0.89)));
  CHECK_FALSE(satisfies_diagonal_dominance(make_template(TemplateKind::Uniform, 10, 0.90)));
  CHECK_FALSE(satisfies_diagonal_dominance(make_template(TemplateKind::LandCoverChange, 10, 0.3)));
  CHECK(satisfies_diagonal_dominance(make_template(TemplateKind::LandCoverChange, 10, 0.2999)));
  CHECK_FALSE(satisfies_diagonal_dominance(make_template(TemplateKind::InterclassSimilarity, 10, 0.5)));
  CHECK(satisfies_diagonal_dominance(make_template(TemplateKind::InterclassSimilarity, 10, 0.4999)));
}

TEST_CASE("sample_weak_label with the identity never flips") {
  Rng rng(1);
  const TransitionMatrix t = TransitionMatrix::identity(5);
  for (std::size_t j = 0; j < 5; ++j) {
    for (int i = 0; i < 200; ++i) CHECK(sample_weak_label(t, j, rng) == j);
  }
}

TEST_CASE("sample_weak_label keeps water classes of the mixed template") {
  Rng rng(2);
  const TransitionMatrix t = make_template(TemplateKind::MixedClassDependent, 10, 0.4);
  for (int i = 0; i < 1000; ++i) CHECK(sample_weak_label(t, 9, rng) == 9);
}

TEST_CASE("sample_weak_label frequencies match the row") {
  Rng rng(3);
  const TransitionMatrix t = make_template(TemplateKind::Uniform, 10, 0.2);
  const int n = 100000;
  std::vector<int> counts(10, 0);
  for (int i = 0; i < n; ++i) ++counts[sample_weak_label(t, 3, rng)];
  const double flipped = 1.0 - static_cast<double>(counts[3]) / n;
  CHECK(std::abs(flipped - 0.2) <= 0.01);

  const TransitionMatrix mixed = make_template(TemplateKind::LandCoverChange, 10, 0.45);
  std::vector<int> row_counts(10, 0);
  for (int i = 0; i < n; ++i) ++row_counts[sample_weak_label(mixed, 7, rng)];
  for (std::size_t k = 0; k < 10; ++k) {
    CHECK(std::abs(static_cast<double>(row_counts[k]) / n - mixed(7, k)) < 0.006);
  }
  CHECK_THROWS(sample_weak_label(t, 10, rng));
}

TEST_CASE("flips are nested in eta for a fixed stream") {
  // Same seed, growing eta: every label flipped at low eta stays flipped.
  for (double low : {0.1, 0.2, 0.3}) {
    const double high = low + 0.2;
    const TransitionMatrix a = make_template(TemplateKind::MixedClassDependent, 10, low);
    const TransitionMatrix b = make_template(TemplateKind::MixedClassDependent, 10, high);
    Rng ra(9), rb(9);
    for (int i = 0; i < 5000; ++i) {
      const std::size_t j = static_cast<std::size_t>(i % 10);
      const bool flipped_low = sample_weak_label(a, j, ra) != j;
      const bool flipped_high = sample_weak_label(b, j, rb) != j;
      if (flipped_low) CHECK(flipped_high);
    }
  }
}

TEST_CASE("matrix text format round-trips") {
  const TransitionMatrix t = make_template(TemplateKind::InterclassSimilarity, 10, 0.37);
  std::stringstream buffer;
  write_matrix(buffer, t);
  std::string first_line;
  std::getline(buffer, first_line);
  CHECK(first_line == "10");
  buffer.seekg(0);
  CHECK(read_matrix(buffer) == t);

  std::istringstream broken("2\n0.5 0.5\n0.5");
  CHECK_THROWS(read_matrix(broken));
  std::istringstream not_stochastic("2\n0.5 0.4\n0.5 0.5");
  CHECK_THROWS(read_matrix(not_stochastic));
}

TEST_CASE("source spec invariants") {
  SourceSpec clean{0, TransitionMatrix::identity(3), 10, 1.0};
  CHECK_NOTHROW(clean.validate());
  SourceSpec bad_clean{0, make_template(TemplateKind::Uniform, 3, 0.1), 10, 1.0};
  CHECK_THROWS(bad_clean.validate());
  SourceSpec bad_weight{1, make_template(TemplateKind::Uniform, 3, 0.1), 10, 0.0};
  CHECK_THROWS(bad_weight.validate());
}

TEST_CASE("template kind names") {
  for (TemplateKind kind : kTenClassKinds) CHECK(parse_template_kind(to_string(kind)) == kind);
  CHECK(parse_template_kind("a") == TemplateKind::MixedClassDependent);
  CHECK(parse_template_kind("d") == TemplateKind::InterclassSimilarity);
  CHECK_THROWS(parse_template_kind("nope"));
  CHECK(max_abs_diff(make_template(TemplateKind::Uniform, 10, 0.0), TransitionMatrix::identity(10)) == 0.0);
}

TEST_CASE("binary search locates each dominance flip point") {
  const double thresholds[] = {0.4, 0.9, 0.3, 0.5};
  for (std::size_t i = 0; i < 4; ++i) {
    double lo = 0.0, hi = template_eta_limit(kTenClassKinds[i]) - 1e-12;
    REQUIRE(satisfies_diagonal_dominance(make_template(kTenClassKinds[i], 10, lo)));
    REQUIRE_FALSE(satisfies_diagonal_dominance(make_template(kTenClassKinds[i], 10, hi)));
    while (hi - lo > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      (satisfies_diagonal_dominance(make_template(kTenClassKinds[i], 10, mid)) ? lo : hi) = mid;
    }
    CHECK(std::abs(hi - thresholds[i]) <= 1e-9);
  }
}
