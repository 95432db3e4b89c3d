#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pinlab/harmonium.hpp"
#include "pinlab/scalar.hpp"

#include <cmath>
#include <vector>

using namespace pinlab;

TEST_CASE("the decay factor vanishes exactly at zero coupling") {
  for (int n = 2; n <= 5; ++n) {
    const auto p = params_from_kappa<double>(n, 0.0);
    CHECK(p.q == 0.0);
    CHECK(p.delta == 0.0);
    CHECK(p.scale_ratio == 1.0);
  }
}

TEST_CASE("the decay factor at unit coupling matches its closed form") {
  const auto p = params_from_kappa<double>(3, 1.0);
  // q = 1 - 2N / (N + sqrt(N^2 + 4(N-1) sinh^2 delta)) at N = 3,
  // delta = ln(2)/4, evaluated independently.
  CHECK(p.q == doctest::Approx(0.0066506659756141425).epsilon(1e-15));
  CHECK(p.delta == doctest::Approx(std::log(2.0) / 4.0).epsilon(1e-15));
}

TEST_CASE("coupling and log-scale parametrizations are inverse to each other") {
  const auto p = params_from_delta<double>(3, std::log(2.0) / 2.0);
  CHECK(p.kappa == doctest::Approx(3.0).epsilon(1e-14));

  const auto q = params_from_kappa<double>(4, 7.5);
  const auto back = params_from_delta<double>(4, q.delta);
  CHECK(back.kappa == doctest::Approx(7.5).epsilon(1e-14));

  const auto unit = params_from_delta<double>(3, 1.0);
  CHECK(unit.kappa == doctest::Approx(53.598150033144236).epsilon(1e-12));
}

TEST_CASE("the decay factor grows strictly with coupling and stays below one") {
  for (int n : {2, 3, 5}) {
    double prev = 0.0;
    for (double lk = -3.0; lk <= 6.0; lk += 0.5) {
      const double kappa = std::pow(10.0, lk);
      const auto p = params_from_kappa<double>(n, kappa);
      CHECK(p.q > prev);
      CHECK(p.q < 1.0);
      prev = p.q;
    }
  }
}

TEST_CASE("the dual pair negates the log scale but shares the decay factor") {
  const auto p = params_from_delta<double>(3, 0.35);
  const auto d = duality_pair(p);
  CHECK(d.delta == -p.delta);
  // q depends on delta only through sinh^2, so the two match exactly.
  CHECK(d.q == p.q);
  CHECK(d.scale_ratio == doctest::Approx(1.0 / p.scale_ratio).epsilon(1e-15));
  // The one-body length scales are reciprocal between the dual points.
  CHECK(d.basis_scale * p.basis_scale == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("the scale ratio tracks the log-scale parameter") {
  const auto p = params_from_delta<double>(4, 0.2);
  CHECK(p.scale_ratio == doctest::Approx(std::exp(0.2)).epsilon(1e-15));
}

TEST_CASE("the weak-coupling expansion of the decay factor has the right leading terms") {
  // q = (N-1)/(16 N^2) (kappa^2 - kappa^3) + O(kappa^4): the ratio to the
  // truncated series approaches one quadratically in kappa.
  for (int n : {3, 4}) {
    double prev_gap = 1.0;
    for (double kappa : {1e-1, 1e-2, 1e-3}) {
      const auto p = params_from_kappa<double>(n, kappa);
      const double series = q_weak_expansion(n, kappa);
      const double gap = std::abs(p.q / series - 1.0);
      CHECK(gap < 10.0 * kappa * kappa + 1e-9);
      CHECK(gap < prev_gap);
      prev_gap = gap;
    }
  }
}

TEST_CASE("the bosonic marginal spectrum is geometric and sums to the particle number") {
  const auto p = params_from_kappa<double>(3, 2.5);
  const std::vector<double> spec = bosonic_spectrum(p, 200);
  REQUIRE(spec.size() == 201);
  CHECK(spec[0] == doctest::Approx(3.0 * (1.0 - p.q)).epsilon(1e-14));
  double sum = 0.0;
  for (double v : spec) sum += v;
  CHECK(sum == doctest::Approx(3.0).epsilon(1e-13));
  for (std::size_t k = 1; k < 20; ++k) {
    CHECK(spec[k] / spec[k - 1] == doctest::Approx(p.q).epsilon(1e-13));
  }
  CHECK_THROWS_AS(bosonic_spectrum(p, -1), std::invalid_argument);
}

TEST_CASE("parameter construction rejects out-of-scope inputs") {
  CHECK_THROWS_AS(params_from_kappa<double>(3, -0.5), std::domain_error);
  CHECK_THROWS_AS(params_from_delta<double>(1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(params_from_kappa<double>(0, 1.0), std::invalid_argument);
}

TEST_CASE("parameters carry over to the wide scalar type consistently") {
  set_precision_bits(128);
  const auto pd = params_from_kappa<double>(3, 1.0);
  const auto pw = params_from_kappa<Real>(3, Real(1));
  CHECK(to_double(pw.q) == doctest::Approx(pd.q).epsilon(1e-15));
  CHECK(to_double(pw.basis_scale) == doctest::Approx(pd.basis_scale).epsilon(1e-14));
}
