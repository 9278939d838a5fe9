#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "blowlab/interp.hpp"
#include "blowlab/logspace.hpp"
#include "blowlab/quadrature.hpp"

using namespace blowlab;

TEST_CASE("Gauss-Kronrod handles smooth, peaked and oscillatory integrands") {
  auto sq = [](double x) { return x * x; };
  QuadResult r = gauss_kronrod_adaptive(sq, 0.0, 1.0, 1e-13, 0.0);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  r = gauss_kronrod_adaptive([](double x) { return std::exp(-x); }, 0.0, 50.0,
                             1e-13, 0.0);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-13));

  r = gauss_kronrod_adaptive([](double x) { return std::exp(-x * x); }, -8.0, 8.0,
                             1e-13, 0.0);
  CHECK(r.value == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-13));

  r = gauss_kronrod_adaptive([](double x) { return std::sin(x); }, 0.0,
                             10.0 * M_PI, 1e-12, 1e-14);
  CHECK(std::abs(r.value) < 1e-12);

  // A sharp interior peak forces genuine adaptivity.
  r = gauss_kronrod_adaptive(
      [](double x) { return 1.0 / (1e-6 + (x - 0.3) * (x - 0.3)); }, 0.0, 1.0,
      1e-11, 0.0);
  CHECK(r.converged);
  const double exact = (std::atan(0.7 / 1e-3) + std::atan(0.3 / 1e-3)) / 1e-3;
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-10));
}

TEST_CASE("composite Simpson is exact for cubics and validates input") {
  std::vector<double> samples;
  const double dx = 0.1;
  for (int i = 0; i <= 10; ++i) {
    const double x = i * dx;
    samples.push_back(x * x * x - 2.0 * x + 1.0);
  }
  const double exact = 0.25 - 1.0 + 1.0; // int_0^1
  CHECK(simpson_uniform(samples, dx) == doctest::Approx(exact).epsilon(1e-14));

  std::vector<double> even(4, 1.0);
  CHECK_THROWS(simpson_uniform(even, 0.1));
}

TEST_CASE("compensated sum keeps tiny increments") {
  CompensatedSum acc;
  acc.add(1.0);
  for (int i = 0; i < 1000000; ++i) acc.add(1e-18);
  CHECK(acc.value() == doctest::Approx(1.0 + 1e-12).epsilon(1e-15));
}

TEST_CASE("monotone cubic: exactness, shape preservation, clamping") {
  { // linear data reproduced exactly
    std::vector<double> x{0.0, 0.5, 1.2, 3.0}, y;
    for (double xi : x) y.push_back(2.0 * xi - 1.0);
    MonotoneCubic m(x, y);
    for (double xq : {0.1, 0.77, 2.4}) {
      CHECK(m(xq) == doctest::Approx(2.0 * xq - 1.0).epsilon(1e-15));
      CHECK(m.derivative(xq) == doctest::Approx(2.0).epsilon(1e-13));
    }
  }
  { // monotone data stays monotone between nodes (no overshoot)
    std::vector<double> x{0, 1, 2, 3, 4, 5};
    std::vector<double> y{0.0, 0.01, 0.02, 5.0, 5.01, 5.02}; // step-like
    MonotoneCubic m(x, y);
    double prev = m(0.0);
    for (int i = 1; i <= 500; ++i) {
      const double cur = m(5.0 * i / 500.0);
      CHECK(cur >= prev - 1e-12);
      prev = cur;
    }
    CHECK(m(5.0) == doctest::Approx(5.02));
  }
  { // clamped outside the node range
    std::vector<double> x{0.0, 1.0}, y{3.0, 4.0};
    MonotoneCubic m(x, y);
    CHECK(m(-5.0) == 3.0);
    CHECK(m(9.0) == 4.0);
  }
  { // order of accuracy on a smooth monotone profile: err(h/2) <= err(h)/4
    auto make_err = [](int n) {
      std::vector<double> x(n + 1), y(n + 1);
      for (int i = 0; i <= n; ++i) {
        x[i] = double(i) / n;
        y[i] = std::tanh(3.0 * x[i]);
      }
      MonotoneCubic m(x, y);
      double worst = 0.0;
      for (int i = 0; i < 2000; ++i) {
        const double xq = (i + 0.5) / 2000.0;
        worst = std::max(worst, std::abs(m(xq) - std::tanh(3.0 * xq)));
      }
      return worst;
    };
    const double e1 = make_err(32);
    const double e2 = make_err(64);
    CHECK(e2 <= e1 / 4.0);
  }
  { // invalid input
    std::vector<double> x{0.0, 0.0, 1.0}, y{1.0, 2.0, 3.0};
    CHECK_THROWS(MonotoneCubic(x, y));
  }
}
