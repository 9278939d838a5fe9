#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "blowlab/errors.hpp"
#include "blowlab/nonlinearity.hpp"
#include "oracle.hpp"

using namespace blowlab;

namespace {

// Values frozen from tests/oracle.hpp (adaptive Simpson, rel tol 1e-13),
// cross-checked against erfc / expint closed forms where they exist.
constexpr double kF20_at_0 = 0.88622692545275794; // = sqrt(pi)/2
constexpr double kF20_at_1 = 0.13940279264033098;
constexpr double kF20_at_2 = 0.0041455346903363334;
constexpr double kFpF20_at_1 = 0.75787215614131198; // = 2e F(1)

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

TEST_CASE("f and f' closed-form examples") {
  const Nonlinearity nl20 = Nonlinearity::super_exponential(2, 0);
  CHECK(nl20.f(1.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  CHECK(nl20.f_prime(1.0) == doctest::Approx(2.0 * std::exp(1.0)).epsilon(1e-14));

  const Nonlinearity nl21 = Nonlinearity::super_exponential(2, 1);
  CHECK(nl21.f(0.0) == 0.0);
  CHECK(nl21.log_f(0.0) == -kInf);
  CHECK(nl21.f_prime(1.0) == doctest::Approx(3.0 * std::exp(1.0)).epsilon(1e-14));
  CHECK_THROWS_AS((void)nl21.f_prime(0.0), DomainError);

  const Nonlinearity nl32 = Nonlinearity::super_exponential(3, 2);
  CHECK(nl32.log_f(2.0) == doctest::Approx(8.0 + 2.0 * std::log(2.0)).epsilon(1e-15));
  CHECK(nl32.f(2.0) == doctest::Approx(std::exp(8.0) * 4.0).epsilon(1e-13));

  const Nonlinearity nle = Nonlinearity::pure_exponential();
  for (double u : {0.0, 0.7, 3.0, 10.0}) {
    CHECK(nle.log_f_prime(u) == u); // f'(u) = e^u
  }
}

TEST_CASE("linear form overflows are errors, log form is not") {
  const Nonlinearity nl = Nonlinearity::super_exponential(2, 0);
  CHECK_THROWS_AS((void)nl.f(50.0), NumericalError); // e^{2500}
  CHECK(nl.log_f(50.0) == doctest::Approx(2500.0));
  CHECK(std::isfinite(nl.log_F(1000.0).log_magnitude)); // ~ -1e6, finite
  CHECK(nl.log_F(1000.0).log_magnitude < -9.9e5);
}

TEST_CASE("log F known values") {
  const Nonlinearity nl20 = Nonlinearity::super_exponential(2, 0);
  CHECK(nl20.F(0.0) == doctest::Approx(kF20_at_0).epsilon(1e-12));
  CHECK(nl20.F(1.0) == doctest::Approx(kF20_at_1).epsilon(1e-12));
  CHECK(nl20.F(2.0) == doctest::Approx(kF20_at_2).epsilon(1e-12));

  const Nonlinearity nle = Nonlinearity::pure_exponential();
  CHECK(nle.log_F(3.0).log_magnitude == doctest::Approx(-3.0).epsilon(1e-15));

  const Nonlinearity nlp = Nonlinearity::power(3);
  CHECK(nlp.F(2.0) == doctest::Approx(0.125).epsilon(1e-13));

  // q >= 1: F(0) diverges; the sentinel is the honest answer.
  const Nonlinearity nl21 = Nonlinearity::super_exponential(2, 1);
  CHECK(nl21.log_F(0.0).is_infinite());
}

TEST_CASE("log F against the quadrature oracle on the full test matrix") {
  for (double p : {1.5, 2.0, 3.0}) {
    for (double q : {0.0, 1.0, 2.0}) {
      const Nonlinearity nl = Nonlinearity::super_exponential(p, q);
      for (int i = (q >= 1.0 ? 1 : 0); i <= 25; ++i) {
        const double u = 5.0 * i / 25.0;
        const double mine = nl.log_F(u).log_magnitude;
        const double ref = oracle::log_lifetime_integral(p, q, u);
        CHECK(std::abs(mine - ref) <=
              1e-10 * std::max(1.0, std::abs(ref))); // rel error of F <= 1e-10
      }
    }
  }
}

TEST_CASE("(2,0) family against the erfc closed form far into the tail") {
  const Nonlinearity nl = Nonlinearity::super_exponential(2, 0);
  for (double u : {0.1, 0.9, 2.5, 6.0, 12.0, 20.0, 26.0}) {
    const double ref = std::log(kF20_at_0 * std::erfc(u));
    CHECK(nl.log_F(u).log_magnitude ==
          doctest::Approx(ref).epsilon(1e-13).scale(std::max(1.0, std::abs(ref))));
  }
  // q = 1 reduces to the exponential integral.
  const Nonlinearity nl21 = Nonlinearity::super_exponential(2, 1);
  for (double u : {0.3, 1.0, 2.0}) {
    const double ref = -std::expint(-u * u) / 2.0; // E1(u^2)/2
    CHECK(nl21.F(u) == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("inverse: seeds, round trips, domain errors") {
  const Nonlinearity nle = Nonlinearity::pure_exponential();
  CHECK(nle.F_inverse_log(-5.0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(nle.asymptotic_inverse(-7.0) == doctest::Approx(7.0).epsilon(1e-15));
  CHECK_THROWS_AS((void)nle.F_inverse_log(0.5), DomainError);

  const Nonlinearity nl20 = Nonlinearity::super_exponential(2, 0);
  CHECK(nl20.F_inverse_log(nl20.log_F(2.0).log_magnitude) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(nl20.asymptotic_inverse(-10000.0) == doctest::Approx(100.0).epsilon(1e-15));
  // Newton against the asymptote: u = 100 (1 + delta), |delta| <= 0.01.
  const double u4 = nl20.F_inverse_log(-1e4);
  CHECK(std::abs(u4 / 100.0 - 1.0) <= 0.01);
  // The asymptote ratio at S = 184 (~ e^{-80 ln 10}).
  const double ratio = nl20.F_inverse_log(-184.0) / std::pow(184.0, 0.5);
  CHECK(std::abs(ratio - 1.0) <= 0.05);

  CHECK_THROWS_WITH_AS((void)nl20.F_inverse_log(0.0),
                       doctest::Contains("not below log F(0)"), DomainError);

  // Deep-input round trip: y as small as e^{-1e6}.
  const double u_deep = nl20.F_inverse_log(-1e6);
  CHECK(nl20.log_F(u_deep).log_magnitude == doctest::Approx(-1e6).epsilon(1e-12));
}

TEST_CASE("round trip across the whole family matrix") {
  for (double p : {1.5, 2.0, 3.0}) {
    for (double q : {0.0, 1.0, 2.0}) {
      const Nonlinearity nl = Nonlinearity::super_exponential(p, q);
      for (int i = 0; i < 40; ++i) {
        const double u = 0.5 + (50.0 - 0.5) * i / 39.0;
        const double back = nl.F_inverse_log(nl.log_F(u).log_magnitude);
        CHECK(std::abs(back - u) <= 1e-10 * std::max(1.0, u));
      }
    }
  }
}

TEST_CASE("log F is strictly decreasing") {
  // Deterministic LCG sampling; no need for a real RNG.
  unsigned long long state = 88172645463325252ull;
  auto next_u = [&] {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return 1e-3 + 60.0 * double(state >> 11) / 9007199254740992.0;
  };
  for (double p : {1.5, 2.0}) {
    for (double q : {0.0, 2.0}) {
      const Nonlinearity nl = Nonlinearity::super_exponential(p, q);
      std::vector<double> us;
      for (int i = 0; i < 30; ++i) us.push_back(next_u());
      std::sort(us.begin(), us.end());
      for (size_t i = 1; i < us.size(); ++i) {
        CHECK(nl.log_F(us[i]).log_magnitude < nl.log_F(us[i - 1]).log_magnitude);
      }
    }
  }
}

TEST_CASE("derivative of log F matches -1/(fF)") {
  for (double p : {1.5, 2.0, 3.0}) {
    for (double q : {0.0, 1.0}) {
      const Nonlinearity nl = Nonlinearity::super_exponential(p, q);
      for (int i = 0; i < 17; ++i) {
        const double u = 0.6 + (12.0 - 0.6) * i / 16.0;
        const double h = 1e-5 * std::max(1.0, u);
        const double fd =
            (nl.log_F(u + h).log_magnitude - nl.log_F(u - h).log_magnitude) /
            (2.0 * h);
        const double analytic =
            -std::exp(-(nl.log_f(u) + nl.log_F(u).log_magnitude));
        CHECK(fd == doctest::Approx(analytic).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("f'F: frozen values, bounds, and the small-u limits") {
  const Nonlinearity nl20 = Nonlinearity::super_exponential(2, 0);
  CHECK(nl20.fprime_F(1.0) == doctest::Approx(kFpF20_at_1).epsilon(1e-10));

  const double at10 = nl20.fprime_F(10.0);
  CHECK(at10 > 0.99);
  CHECK(at10 < 1.0);
  CHECK(nl20.one_minus_fprime_F(10.0) * (2.0 * 100.0) <= 2.0);

  // Reference families have constant f'F.
  CHECK(Nonlinearity::pure_exponential().fprime_F(13.0) == 1.0);
  CHECK(Nonlinearity::pure_exponential().one_minus_fprime_F(13.0) == 0.0);
  CHECK(Nonlinearity::power(2).fprime_F(7.0) == doctest::Approx(2.0));

  // q > 1: the limit at u -> 0 is q/(q-1).
  const Nonlinearity nl22 = Nonlinearity::super_exponential(2, 2);
  CHECK(nl22.fprime_F(1e-5) == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(nl22.fprime_F(1e-7) == doctest::Approx(2.0).epsilon(1e-5));

  // q = 1: genuinely unbounded towards u = 0; report the honest large value.
  const Nonlinearity nl21 = Nonlinearity::super_exponential(2, 1);
  CHECK(nl21.fprime_F(1e-6) > 5.0);
  CHECK(nl21.fprime_F(1e-12) > nl21.fprime_F(1e-6));
}

TEST_CASE("one_minus_fprime_F agrees with the oracle product") {
  // 1 - f'(u) F(u) with both factors from the independent oracle; only
  // meaningful while the subtraction itself has digits left (u <= ~4).
  for (double p : {2.0, 3.0}) {
    for (double q : {0.0, 2.0}) {
      const Nonlinearity nl = Nonlinearity::super_exponential(p, q);
      const double l = nl.threshold_l();
      for (double u : {1.0, 1.9, 3.0, 4.0}) {
        if (u < l) continue;
        const double logF = oracle::log_lifetime_integral(p, q, u);
        const double ref = 1.0 - std::exp(nl.log_f_prime(u) + logF);
        CHECK(nl.one_minus_fprime_F(u) ==
              doctest::Approx(ref).epsilon(1e-6).scale(std::abs(ref) + 1e-12));
      }
    }
  }
  // Deep tail: compare against the erfc closed form for (2,0), where the
  // naive subtraction would have lost every digit.
  const Nonlinearity nl20 = Nonlinearity::super_exponential(2, 0);
  const double ref10 =
      1.0 - 2.0 * 10.0 * std::exp(100.0) * kF20_at_0 * std::erfc(10.0);
  CHECK(nl20.one_minus_fprime_F(10.0) == doctest::Approx(ref10).epsilon(1e-6));
}

TEST_CASE("the scaled deficit approaches p - 1 monotonically in the tail") {
  // (1 - f'F)(p u^p + q) -> p - 1; the tail samples must already sit near
  // that limit and drift towards it.
  for (double p : {1.5, 2.0, 3.0}) {
    for (double q : {0.0, 2.0}) {
      const Nonlinearity nl = Nonlinearity::super_exponential(p, q);
      double prev_dist = 1e300;
      for (double u : {12.0, 24.0, 50.0}) {
        const double deficit =
            nl.one_minus_fprime_F(u) * (p * std::pow(u, p) + q);
        const double dist = std::abs(deficit - (p - 1.0));
        CHECK(deficit > 0.0);
        CHECK(dist <= 0.2 * (p - 1.0));
        CHECK(dist <= prev_dist * (1.0 + 1e-9));
        prev_dist = dist;
      }
    }
  }
}

TEST_CASE("threshold l") {
  const Nonlinearity nl20 = Nonlinearity::super_exponential(2, 0);
  CHECK(nl20.threshold_l() == 0.0);

  const Nonlinearity nl22 = Nonlinearity::super_exponential(2, 2);
  CHECK(nl22.threshold_l() >= 1.0); // the (q/(p(p-1)))^{1/p} term
  CHECK(nl22.threshold_l() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-7));

  const Nonlinearity nl30 = Nonlinearity::super_exponential(3, 0);
  CHECK(nl30.threshold_l() == 0.0);

  // Beyond l the product never exceeds 1.
  for (const Nonlinearity& nl : {nl20, nl22, nl30}) {
    const double l = std::max(nl.threshold_l(), 1e-3);
    for (int i = 0; i < 200; ++i) {
      const double u = l + (50.0 - l) * i / 199.0;
      CHECK(nl.fprime_F(u) <= 1.0 + 1e-9);
    }
  }
  CHECK_THROWS_AS((void)Nonlinearity::pure_exponential().threshold_l(), DomainError);
}

TEST_CASE("family invariants are enforced") {
  CHECK_THROWS_AS(Nonlinearity::super_exponential(1.0, 0.0), ConfigError);  // p > 1
  CHECK_THROWS_AS(Nonlinearity::super_exponential(2.0, 0.5), ConfigError);  // q gap
  CHECK_THROWS_AS(Nonlinearity::power(1.0), ConfigError);
  CHECK_NOTHROW(Nonlinearity::super_exponential(2.0, 1.0));
  CHECK_NOTHROW(Nonlinearity::super_exponential(1.5, 0.0));
}

TEST_CASE("LogValue sentinels round-trip the edge cases") {
  CHECK(LogValue::zero().is_zero());
  CHECK(LogValue::infinity().is_infinite());
  CHECK(LogValue::zero().value() == 0.0);
  CHECK(LogValue::from_linear(2.5).value() == doctest::Approx(2.5).epsilon(1e-15));
}
