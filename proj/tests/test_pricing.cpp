#include <stdexcept>
#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "oracle_helpers.hpp"
#include "recq/pricing.hpp"

using namespace recq;

namespace {

// Discounted lognormal payoff integral, evaluated with the independent
// quadrature helper: e^{-r tau} E[(K - x e^{(r - sigma^2/2) tau + sigma sqrt(tau) Z})^+].
double quadrature_put(double x, double sigma, double r, double tau, double K) {
  const double m = (r - 0.5 * sigma * sigma) * tau;
  const double s = sigma * std::sqrt(tau);
  const double zstar = (std::log(K / x) - m) / s;
  auto f = [&](double z) {
    const double payoff = K - x * std::exp(m + s * z);
    return payoff > 0.0 ? payoff * testor::ref_normal_pdf(z) : 0.0;
  };
  const double lo = std::min(-14.0, zstar - 1.0);
  return std::exp(-r * tau) * testor::integrate(f, lo, zstar, 1e-13);
}

SchemeSpec merton_spec(double sigma, double lambda, double theta) {
  SchemeSpec s;
  s.kind = SchemeKind::JumpEuler;
  s.x0 = 100.0;
  s.T = 0.5;
  s.n = 50;
  s.drift = [](double, double x) { return 0.08 * x; };
  s.diffusion = [sigma](double, double x) { return sigma * x; };
  s.jump_coeff = [](double x) { return x; };
  s.intensity = lambda;
  s.size_law = JumpSizeLaw::lognormal_shift(theta);
  return s;
}

}  // namespace

TEST_CASE("black-scholes put reproduces frozen values") {
  CHECK(bs_put(100.0, 0.0707107, 0.08, 0.5, 100.0) ==
        doctest::Approx(0.5890266891147388).epsilon(1e-13));
  CHECK(bs_put(100.0, 0.2, 0.05, 2.0, 110.0) ==
        doctest::Approx(10.9875718555587).epsilon(1e-12));
}

TEST_CASE("black-scholes put matches the payoff quadrature") {
  struct Case {
    double x, sigma, r, tau, K;
  };
  const Case cases[] = {{100.0, 0.2, 0.05, 1.0, 100.0},
                        {100.0, 0.07, 0.08, 0.5, 98.0},
                        {80.0, 0.35, 0.01, 2.5, 95.0},
                        {120.0, 0.15, 0.0, 0.25, 100.0}};
  for (const auto& c : cases) {
    CHECK(bs_put(c.x, c.sigma, c.r, c.tau, c.K) ==
          doctest::Approx(quadrature_put(c.x, c.sigma, c.r, c.tau, c.K)).epsilon(1e-9));
  }
}

TEST_CASE("degenerate black-scholes inputs return discounted intrinsic value") {
  bool flag = false;
  CHECK(bs_put(90.0, 0.0, 0.05, 1.0, 100.0) ==
        doctest::Approx(100.0 * std::exp(-0.05) - 90.0).epsilon(1e-15));
  (void)bs_put(90.0, 0.0, 0.05, 1.0, 100.0, &flag);
  CHECK(flag);
  (void)bs_put(110.0, 0.2, 0.05, 0.0, 100.0, &flag);
  CHECK(flag);
  CHECK(bs_put(110.0, 0.2, 0.05, 0.0, 100.0) == 0.0);  // tau = 0: undiscounted intrinsic
  (void)bs_put(100.0, 0.2, 0.05, 1.0, 100.0, &flag);
  CHECK_FALSE(flag);
  CHECK_THROWS_AS((void)bs_put(0.0, 0.2, 0.05, 1.0, 100.0), std::invalid_argument);
  CHECK_THROWS_AS((void)bs_put(100.0, 0.2, 0.05, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("jump-model put series reproduces frozen values") {
  CHECK(merton_put_series(100.0, 0.07, 0.08, 0.5, 5.0, 0.04, 100.0) ==
        doctest::Approx(1.5185072402697315).epsilon(1e-12));
  CHECK(merton_put_series(100.0, 0.07, 0.08, 0.5, 1.0, 0.01, 98.0) ==
        doctest::Approx(0.26991109604939205).epsilon(1e-12));
  CHECK(merton_put_series(100.0, 0.07, 0.08, 0.5, 3.0, 0.04, 94.0) ==
        doctest::Approx(0.22707269602251322).epsilon(1e-12));
}

TEST_CASE("put series degenerates to black-scholes without jumps") {
  CHECK(merton_put_series(100.0, 0.2, 0.05, 1.0, 0.0, 0.04, 105.0) ==
        bs_put(100.0, 0.2, 0.05, 1.0, 105.0));
  CHECK(std::abs(merton_put_series(100.0, 0.07, 0.08, 0.5, 5.0, 1e-8, 100.0) -
                 bs_put(100.0, 0.07, 0.08, 0.5, 100.0)) <= 1e-10);
}

TEST_CASE("put series is insensitive to the tail tolerance once converged") {
  const double a = merton_put_series(100.0, 0.07, 0.08, 0.5, 10.0, 0.06, 100.0, 1e-10);
  const double b = merton_put_series(100.0, 0.07, 0.08, 0.5, 10.0, 0.06, 100.0, 1e-15);
  CHECK(std::abs(a - b) <= 1e-9);
}

TEST_CASE("put series is monotone in spot and strike") {
  double prev = 1e9;
  for (double x0 : {80.0, 90.0, 100.0, 110.0, 120.0}) {
    const double v = merton_put_series(x0, 0.07, 0.08, 0.5, 5.0, 0.04, 100.0);
    CHECK(v <= prev);
    prev = v;
  }
  prev = -1.0;
  for (double K : {90.0, 92.0, 94.0, 96.0, 98.0, 100.0, 104.0}) {
    const double v = merton_put_series(100.0, 0.07, 0.08, 0.5, 5.0, 0.04, K);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("put series validates its arguments") {
  CHECK_THROWS_AS((void)merton_put_series(0.0, 0.07, 0.08, 0.5, 5.0, 0.04, 100.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)merton_put_series(100.0, 0.07, 0.08, 0.0, 5.0, 0.04, 100.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)merton_put_series(100.0, 0.07, 0.08, 0.5, -1.0, 0.04, 100.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)merton_put_series(100.0, 0.07, 0.08, 0.5, 5.0, -0.04, 100.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      (void)merton_put_series(100.0, 0.07, 0.08, 0.5, 5.0, 0.04, 100.0, 0.0),
      std::invalid_argument);
}

TEST_CASE("closed form on a scheme matches the direct series") {
  const SchemeSpec model = merton_spec(0.07, 5.0, 0.04);
  PutSpec put;
  put.strike = 100.0;
  put.rate = 0.08;
  put.maturity = 0.5;
  put.spot = 100.0;
  CHECK(merton_put_closed_form(model, put) ==
        merton_put_series(100.0, 0.07, 0.08, 0.5, 5.0, 0.04, 100.0));

  put.spot = 97.0;  // sigma is read off the proportional diffusion at the spot
  CHECK(merton_put_closed_form(model, put) ==
        merton_put_series(97.0, 0.07, 0.08, 0.5, 5.0, 0.04, 100.0));

  SchemeSpec euler = model;
  euler.kind = SchemeKind::Euler;
  CHECK_THROWS_AS((void)merton_put_closed_form(euler, put), std::invalid_argument);
  SchemeSpec gauss = model;
  gauss.size_law = JumpSizeLaw::gaussian(0.0, 0.04);
  CHECK_THROWS_AS((void)merton_put_closed_form(gauss, put), std::invalid_argument);
  put.spot = 0.0;
  CHECK_THROWS_AS((void)merton_put_closed_form(model, put), std::invalid_argument);
}

TEST_CASE("equivalent volatility matches the frozen spot checks") {
  CHECK(equivalent_bs_vol(0.07, 5.0, 0.04) ==
        doctest::Approx(0.11357816691600547).epsilon(1e-15));
  CHECK(equivalent_bs_vol(0.07, 1.0, 0.01) ==
        doctest::Approx(0.070710678118654752).epsilon(1e-15));
  std::mt19937_64 rng(2026081607ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const double s = 0.5 * unit(rng), l = 10.0 * unit(rng), t = 0.2 * unit(rng);
    CHECK(equivalent_bs_vol(s, l, t) ==
          doctest::Approx(std::sqrt(s * s + l * t * t)).epsilon(1e-15));
  }
  CHECK_THROWS_AS((void)equivalent_bs_vol(-0.1, 1.0, 0.01), std::invalid_argument);
}

TEST_CASE("quantized put prices a hand-built terminal grid") {
  QuantizedChain chain;
  chain.grids.resize(2);
  chain.marginal_weights.resize(2);
  chain.grids[0].points = {100.0};
  chain.marginal_weights[0] = {1.0};
  chain.grids[1].points = {90.0, 100.0, 110.0};
  chain.marginal_weights[1] = {0.25, 0.5, 0.25};

  PutSpec put;
  put.strike = 100.0;
  put.rate = 0.0;
  put.maturity = 1.0;
  put.spot = 100.0;
  CHECK(quantized_put(chain, put) == doctest::Approx(2.5).epsilon(1e-15));

  put.rate = 0.05;
  put.maturity = 2.0;
  CHECK(quantized_put(chain, put) ==
        doctest::Approx(2.5 * std::exp(-0.1)).epsilon(1e-14));

  // identity payoff reduces to the discounted terminal mean
  const double mean = 0.25 * 90.0 + 0.5 * 100.0 + 0.25 * 110.0;
  CHECK(quantized_expectation(chain, [](double x) { return x; }, 0.9) ==
        doctest::Approx(0.9 * mean).epsilon(1e-14));

  QuantizedChain empty;
  CHECK_THROWS_AS((void)quantized_expectation(empty, [](double x) { return x; }, 1.0),
                  std::invalid_argument);
}
