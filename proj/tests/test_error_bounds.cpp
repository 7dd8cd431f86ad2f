#include <stdexcept>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <doctest.h>

#include "recq/error_bounds.hpp"

using namespace recq;

namespace {

// Literal double/triple-loop transcriptions of the displayed formulas, kept
// deliberately naive so they act as an independent oracle.
double naive_regular(double p, int d, double c_dp, const std::vector<double>& alpha,
                     const std::vector<double>& beta, const std::vector<double>& lip,
                     const std::vector<int>& levels, int k) {
  double total = 0.0;
  for (int i = 0; i <= k; ++i) {
    double lip_prod = 1.0;
    for (int m = i + 1; m <= k; ++m) lip_prod *= lip[m];
    double inner = 0.0;
    for (int l = 0; l <= i; ++l) {
      double beta_prod = 1.0;
      for (int m = l + 1; m <= i; ++m) beta_prod *= beta[m];
      inner += alpha[l] * beta_prod;
    }
    total += lip_prod * std::pow(inner, 1.0 / p) *
             std::pow(static_cast<double>(levels[i]), -1.0 / d);
  }
  return c_dp * total;
}

double naive_product(double p, int d, double c_p, const std::vector<double>& alpha,
                     const std::vector<double>& beta, const std::vector<double>& lip,
                     const std::vector<int>& levels, int k) {
  const double dd = static_cast<double>(d);
  double total = 0.0;
  for (int i = 0; i <= k; ++i) {
    double lip_prod = 1.0;
    for (int m = i + 1; m <= k; ++m) lip_prod *= lip[m];
    double inner = 0.0;
    for (int l = 0; l <= i; ++l) {
      double beta_prod = 1.0;
      for (int m = l + 1; m <= i; ++m) beta_prod *= beta[m];
      inner += alpha[l] * beta_prod * std::pow(dd, (0.5 * p - 1.0) * (i - l));
    }
    total += lip_prod * std::pow(inner, 1.0 / p) *
             std::pow(static_cast<double>(levels[i]), -1.0 / d);
  }
  return c_p * std::pow(dd, (p - 2.0) / (2.0 * p)) * total;
}

double naive_step(double C0, double C1, double C2, double T, int n, double x0_norm_p,
                  double c_dp, double p, int d, const std::vector<int>& levels, int k) {
  const double h = T / static_cast<double>(n);
  const double tk = k * h;
  const double growth =
      C2 == 0.0 ? C1 * tk : (C1 / C2) * std::exp(C2 * h) * (std::exp(C2 * tk) - 1.0);
  const double bracket = std::exp(C1 * T) * x0_norm_p + growth;
  double total = 0.0;
  for (int i = 0; i <= k; ++i) {
    total += std::exp(C0 * (tk - i * h)) * std::pow(bracket, 1.0 / p) *
             std::pow(static_cast<double>(levels[i]), -1.0 / d);
  }
  return c_dp * total;
}

double naive_weak(const WeakErrorParams& w, int k) {
  const double tk = k * w.h;
  double total = 0.0;
  for (int l = 0; l <= k; ++l) {
    total += (w.grad_f_lip * std::exp(w.C * (k - l) * w.h) + w.Cprime * w.f_lip * tk) *
             w.sq_errors[l];
  }
  return 0.5 * total;
}

bool close14(double a, double b) {
  return std::abs(a - b) <= 1e-14 * std::max({1.0, std::abs(a), std::abs(b)});
}

BoundCoefficients spot_coeffs() {
  BoundCoefficients c;
  c.p = 2.7;
  c.d = 1;
  c.c_dp = 1.3;
  c.alpha = {0.8, 0.3, 0.45, 0.2};
  c.beta = {0.0, 1.1, 1.3, 1.05};
  c.lip = {0.0, 1.2, 0.9, 1.4};
  return c;
}

}  // namespace

TEST_CASE("regular bound reproduces a frozen spot value") {
  const BoundCoefficients c = spot_coeffs();
  const std::vector<int> levels{1, 30, 25, 40};
  CHECK(regular_bound(c, levels, 3) ==
        doctest::Approx(2.0056871116045497).epsilon(1e-13));
}

TEST_CASE("product bound reproduces a frozen spot value at d=3") {
  BoundCoefficients c = spot_coeffs();
  c.d = 3;
  c.c_p = 1.3;
  const std::vector<int> levels{1, 30, 25, 40};
  CHECK(product_bound(c, levels, 3) ==
        doctest::Approx(4.777987731541939).epsilon(1e-13));
}

TEST_CASE("step bound reproduces a frozen spot value") {
  const std::vector<int> levels{1, 30, 25, 40};
  CHECK(step_bound(0.4, 0.9, 0.25, 1.0, 4, 1.7, 1.3, 2.7, 1, levels, 3) ==
        doctest::Approx(3.4371083367085116).epsilon(1e-13));
}

TEST_CASE("weak error bound reproduces a frozen spot value") {
  WeakErrorParams w;
  w.grad_f_lip = 1.4;
  w.f_lip = 0.8;
  w.C = 0.6;
  w.Cprime = 0.2;
  w.h = 0.1;
  w.sq_errors = {0.0, 0.01, 0.02, 0.005};
  CHECK(weak_error_bound(w, 3) ==
        doctest::Approx(0.027098189612690664).epsilon(1e-13));
}

TEST_CASE("bound evaluators match naive transcriptions on random coefficients") {
  std::mt19937_64 rng(2026081604ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 120; ++trial) {
    const int k = static_cast<int>(rng() % 9);
    const double p = 2.05 + 0.95 * unit(rng);
    const int d = 1 + static_cast<int>(rng() % 4);
    const double c_dp = 0.5 + 1.5 * unit(rng);
    BoundCoefficients c;
    c.p = p;
    c.d = d;
    c.c_dp = c_dp;
    c.alpha.resize(k + 1);
    c.beta.resize(k + 1);
    c.lip.resize(k + 1);
    std::vector<int> levels(k + 1);
    for (int i = 0; i <= k; ++i) {
      c.alpha[i] = 0.05 + 1.95 * unit(rng);
      c.beta[i] = 2.0 * unit(rng);
      c.lip[i] = 2.0 * unit(rng);
      levels[i] = 1 + static_cast<int>(rng() % 100);
    }
    c.beta[0] = 0.0;
    c.lip[0] = 0.0;

    CHECK(close14(regular_bound(c, levels, k),
                  naive_regular(p, d, c_dp, c.alpha, c.beta, c.lip, levels, k)));
    CHECK(close14(product_bound(c, levels, k),
                  naive_product(p, d, c_dp, c.alpha, c.beta, c.lip, levels, k)));
    const double cp = 0.5 + unit(rng);
    c.c_p = cp;
    CHECK(close14(product_bound(c, levels, k),
                  naive_product(p, d, cp, c.alpha, c.beta, c.lip, levels, k)));

    const double C0 = 0.8 * unit(rng), C1 = 0.8 * unit(rng);
    const double C2 = unit(rng) < 0.2 ? 0.0 : 0.8 * unit(rng);
    const double T = 0.25 + unit(rng);
    const int n = std::max(k, 1) + static_cast<int>(rng() % 4);
    const double x0n = 0.2 + 2.0 * unit(rng);
    CHECK(close14(step_bound(C0, C1, C2, T, n, x0n, c_dp, p, d, levels, k),
                  naive_step(C0, C1, C2, T, n, x0n, c_dp, p, d, levels, k)));

    WeakErrorParams w;
    w.grad_f_lip = 2.0 * unit(rng);
    w.f_lip = 2.0 * unit(rng);
    w.C = unit(rng);
    w.Cprime = unit(rng);
    w.h = 0.01 + 0.2 * unit(rng);
    w.sq_errors.resize(k + 1);
    for (int i = 0; i <= k; ++i) w.sq_errors[i] = 0.05 * unit(rng);
    CHECK(close14(weak_error_bound(w, k), naive_weak(w, k)));
  }
}

TEST_CASE("regular bound base cases and scaling") {
  BoundCoefficients c = spot_coeffs();
  const std::vector<int> levels{4, 30, 25, 40};
  // single-term case: c_dp * alpha0^{1/p} * N0^{-1/d}
  CHECK(regular_bound(c, levels, 0) ==
        doctest::Approx(1.3 * std::pow(0.8, 1.0 / 2.7) * 0.25).epsilon(1e-15));
  // doubling every level exactly halves a d=1 bound
  std::vector<int> doubled{8, 60, 50, 80};
  CHECK(regular_bound(c, doubled, 3) == regular_bound(c, levels, 3) / 2.0);
}

TEST_CASE("product bound equals regular bound at d=1") {
  std::mt19937_64 rng(2026081605ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const int k = static_cast<int>(rng() % 7);
    BoundCoefficients c;
    c.p = 2.1 + 0.9 * unit(rng);
    c.d = 1;
    c.c_dp = 0.5 + unit(rng);
    c.alpha.assign(k + 1, 0.0);
    c.beta.assign(k + 1, 0.0);
    c.lip.assign(k + 1, 0.0);
    std::vector<int> levels(k + 1);
    for (int i = 0; i <= k; ++i) {
      c.alpha[i] = unit(rng);
      c.beta[i] = 1.5 * unit(rng);
      c.lip[i] = 1.5 * unit(rng);
      levels[i] = 1 + static_cast<int>(rng() % 60);
    }
    CHECK(product_bound(c, levels, k) == regular_bound(c, levels, k));
  }
}

TEST_CASE("product bound is nondecreasing in the dimension") {
  BoundCoefficients c = spot_coeffs();
  const std::vector<int> levels{1, 30, 25, 40};
  double prev = 0.0;
  for (int d = 1; d <= 6; ++d) {
    c.d = d;
    const double v = product_bound(c, levels, 3);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("bounds are nonnegative, monotone in k, and decreasing in levels") {
  std::mt19937_64 rng(2026081606ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 5);
    BoundCoefficients c;
    c.p = 2.1 + 0.9 * unit(rng);
    c.d = 1 + static_cast<int>(rng() % 3);
    c.c_dp = 0.5 + unit(rng);
    c.alpha.assign(n + 1, 0.0);
    c.beta.assign(n + 1, 0.0);
    c.lip.assign(n + 1, 0.0);
    std::vector<int> levels(n + 1);
    for (int i = 0; i <= n; ++i) {
      c.alpha[i] = 0.05 + unit(rng);
      c.beta[i] = unit(rng);
      c.lip[i] = 1.0 + 0.6 * unit(rng);  // contraction-free maps keep k-monotonicity
      levels[i] = 2 + static_cast<int>(rng() % 60);
    }

    double prev_reg = -1.0, prev_prod = -1.0, prev_step = -1.0, prev_weak = -1.0;
    WeakErrorParams w;
    w.grad_f_lip = 0.5 + unit(rng);
    w.f_lip = unit(rng);
    w.C = unit(rng);
    w.Cprime = unit(rng);
    w.h = 0.05 + 0.1 * unit(rng);
    w.sq_errors.assign(n + 1, 0.0);
    for (int i = 0; i <= n; ++i) w.sq_errors[i] = 0.01 + 0.05 * unit(rng);
    const double T = n * w.h;

    for (int k = 0; k <= n; ++k) {
      const double r = regular_bound(c, levels, k);
      const double pr = product_bound(c, levels, k);
      const double st = step_bound(0.3, 0.7, 0.2, T, n, 1.1, c.c_dp, c.p, c.d, levels, k);
      const double wk = weak_error_bound(w, k);
      CHECK(r >= 0.0);
      CHECK(pr >= 0.0);
      CHECK(st >= 0.0);
      CHECK(wk >= 0.0);
      CHECK(r >= prev_reg);
      CHECK(pr >= prev_prod);
      CHECK(st >= prev_step);
      CHECK(wk >= prev_weak);
      prev_reg = r;
      prev_prod = pr;
      prev_step = st;
      prev_weak = wk;
    }

    // raising any single level strictly lowers the strong bounds
    for (int i = 0; i <= n; ++i) {
      std::vector<int> bumped = levels;
      bumped[i] *= 3;
      CHECK(regular_bound(c, bumped, n) < regular_bound(c, levels, n));
      CHECK(product_bound(c, bumped, n) < product_bound(c, levels, n));
      CHECK(step_bound(0.3, 0.7, 0.2, T, n, 1.1, c.c_dp, c.p, c.d, bumped, n) <
            step_bound(0.3, 0.7, 0.2, T, n, 1.1, c.c_dp, c.p, c.d, levels, n));
    }
  }
}

TEST_CASE("step bound limit cases") {
  const std::vector<int> levels{1, 20, 20, 20, 20};
  // C0 = C1 = 0 removes the growth term entirely
  const double base = step_bound(0.0, 0.0, 0.5, 1.0, 4, 1.7, 1.3, 2.7, 1, levels, 4);
  double expect = 0.0;
  for (int i = 0; i <= 4; ++i) expect += std::pow(1.7, 1.0 / 2.7) / levels[i];
  CHECK(base == doctest::Approx(1.3 * expect).epsilon(1e-14));
  // C2 -> 0 approaches the substituted C1 * t_k limit
  const double lim = step_bound(0.4, 0.9, 0.0, 1.0, 4, 1.7, 1.3, 2.7, 1, levels, 4);
  const double near = step_bound(0.4, 0.9, 1e-9, 1.0, 4, 1.7, 1.3, 2.7, 1, levels, 4);
  CHECK(near == doctest::Approx(lim).epsilon(1e-7));
}

TEST_CASE("weak error bound base cases") {
  WeakErrorParams w;
  w.grad_f_lip = 1.4;
  w.f_lip = 0.8;
  w.C = 0.6;
  w.Cprime = 0.2;
  w.h = 0.1;
  w.sq_errors = {0.003, 0.01, 0.02};
  // k = 0: single term (1/2) grad_f_lip * sq[0] since t_0 = 0
  CHECK(weak_error_bound(w, 0) == doctest::Approx(0.5 * 1.4 * 0.003).epsilon(1e-15));
  WeakErrorParams zero = w;
  zero.sq_errors = {0.0, 0.0, 0.0};
  CHECK(weak_error_bound(zero, 2) == 0.0);
  // nondecreasing in each squared error
  WeakErrorParams bigger = w;
  for (std::size_t l = 0; l < w.sq_errors.size(); ++l) {
    bigger.sq_errors = w.sq_errors;
    bigger.sq_errors[l] += 0.01;
    CHECK(weak_error_bound(bigger, 2) > weak_error_bound(w, 2));
  }
}

TEST_CASE("bound argument validation") {
  BoundCoefficients c = spot_coeffs();
  const std::vector<int> levels{1, 30, 25, 40};
  BoundCoefficients bad = c;
  bad.p = 2.0;
  CHECK_THROWS_AS((void)regular_bound(bad, levels, 3), std::invalid_argument);
  bad.p = 3.2;
  CHECK_THROWS_AS((void)regular_bound(bad, levels, 3), std::invalid_argument);
  bad = c;
  bad.d = 0;
  CHECK_THROWS_AS((void)regular_bound(bad, levels, 3), std::invalid_argument);
  bad = c;
  bad.c_dp = 0.0;
  CHECK_THROWS_AS((void)regular_bound(bad, levels, 3), std::invalid_argument);
  bad = c;
  bad.alpha[2] = -0.1;
  CHECK_THROWS_AS((void)regular_bound(bad, levels, 3), std::invalid_argument);
  CHECK_THROWS_AS((void)regular_bound(c, levels, -1), std::invalid_argument);
  CHECK_THROWS_AS((void)regular_bound(c, {1, 30}, 3), std::invalid_argument);
  CHECK_THROWS_AS((void)regular_bound(c, {1, 30, 0, 40}, 3), std::invalid_argument);
  CHECK_THROWS_AS((void)step_bound(0.4, 0.9, 0.25, 1.0, 4, 1.7, 1.3, 2.0, 1, levels, 3),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)step_bound(0.4, 0.9, 0.25, 1.0, 4, 1.7, 1.3, 2.7, 1, levels, 5),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)step_bound(0.4, 0.9, 0.25, 1.0, 4, -1.0, 1.3, 2.7, 1, levels, 3),
                  std::invalid_argument);
  WeakErrorParams w;
  w.sq_errors = {0.0, 0.01};
  CHECK_THROWS_AS((void)weak_error_bound(w, 2), std::invalid_argument);
  w.sq_errors = {0.0, -0.01};
  CHECK_THROWS_AS((void)weak_error_bound(w, 1), std::invalid_argument);
}

TEST_CASE("propagation constants cover the three scheme kinds") {
  PropagationInputs zero;
  zero.T = 1.0;
  for (auto kind :
       {PropagationKind::Euler, PropagationKind::Milstein, PropagationKind::JumpEuler}) {
    const auto pc = propagation_constants(kind, zero);
    CHECK(pc.C == 0.0);
    CHECK(pc.Cprime == 0.0);
  }

  PropagationInputs in;
  in.s1_sup = 1.0;
  in.T = 1.0;
  const auto euler = propagation_constants(PropagationKind::Euler, in);
  CHECK(euler.C == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(euler.Cprime == 0.0);

  // full Euler transcription
  in = PropagationInputs{};
  in.b1_sup = 0.4;
  in.b2_sup = 0.9;
  in.s1_sup = 0.7;
  in.ssig2_sup = 0.3;
  in.T = 2.0;
  const auto e2 = propagation_constants(PropagationKind::Euler, in);
  const double c1 = 0.4 + 0.5 * 0.7 * 0.7;
  const double c2 = 2.0 * 0.4 + 0.7 * 0.7 + 0.3 + 2.0 * 0.4 * 0.4;
  CHECK(e2.C == doctest::Approx(std::max(c1, c2)).epsilon(1e-15));
  CHECK(e2.Cprime == doctest::Approx(0.9).epsilon(1e-15));

  // Milstein (driftless): sigma-only constants
  PropagationInputs mi;
  mi.s1_sup = 0.6;
  mi.ssig2_sup = 0.25;
  mi.T = 1.5;
  const auto m = propagation_constants(PropagationKind::Milstein, mi);
  const double s1 = 0.6, s2 = 0.25;
  const double expect = s1 * s1 + 0.5 * 1.5 * (s1 * s1 + s2) * (s1 * s1 + s2) +
                        s2 * (1.0 + std::sqrt(1.5) * s1) + 0.5 * s1 * s2;
  CHECK(m.C == doctest::Approx(expect).epsilon(1e-15));
  CHECK(m.Cprime == 0.0);

  // jump Euler reduces to Euler at lambda = 0
  PropagationInputs j0 = in;
  j0.g1_sup = 0.8;
  j0.g2_sup = 0.5;
  j0.gg2_sup = 0.4;
  j0.jump_mean = 0.1;
  j0.jump_second = 0.2;
  j0.lambda = 0.0;
  const auto j0c = propagation_constants(PropagationKind::JumpEuler, j0);
  CHECK(j0c.C == e2.C);
  CHECK(j0c.Cprime == e2.Cprime);

  // full jump transcription
  PropagationInputs j = j0;
  j.lambda = 3.0;
  const auto jc = propagation_constants(PropagationKind::JumpEuler, j);
  const double a = 3.0 * 0.1 * 0.8;
  const double ubar = std::sqrt(0.2) + 3.0 * 2.0 * 0.1;
  const double want =
      std::max(c1, c2) + 2.0 * a + 2.0 * a * a + 3.0 * ubar * ubar * (0.4 + 0.8 * 0.8);
  CHECK(jc.C == doctest::Approx(want).epsilon(1e-14));
  CHECK(jc.Cprime == doctest::Approx(0.9 + 3.0 * 0.5).epsilon(1e-15));

  PropagationInputs neg;
  neg.s1_sup = -0.2;
  CHECK_THROWS_AS((void)propagation_constants(PropagationKind::Euler, neg),
                  std::invalid_argument);
  PropagationInputs nan_mean;
  nan_mean.jump_mean = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS((void)propagation_constants(PropagationKind::JumpEuler, nan_mean),
                  std::invalid_argument);
}

TEST_CASE("rate-constant calibration recovers an exact 1/N law") {
  const std::vector<int> levels{10, 20, 50, 100, 200};
  std::vector<double> errors;
  errors.reserve(levels.size());
  for (int N : levels) errors.push_back(0.7978845608 / N);
  CHECK(calibrate_rate_constant(levels, errors) ==
        doctest::Approx(0.7978845608).epsilon(1e-12));

  // transcription: sum(e_i / N_i) / sum(N_i^{-2})
  const std::vector<double> noisy{0.09, 0.038, 0.017, 0.008, 0.0039};
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    num += noisy[i] / levels[i];
    den += 1.0 / (static_cast<double>(levels[i]) * levels[i]);
  }
  CHECK(calibrate_rate_constant(levels, noisy) ==
        doctest::Approx(num / den).epsilon(1e-14));

  CHECK_THROWS_AS((void)calibrate_rate_constant({10, 20}, {0.1}), std::invalid_argument);
  CHECK_THROWS_AS((void)calibrate_rate_constant({}, {}), std::invalid_argument);
  CHECK_THROWS_AS((void)calibrate_rate_constant({10, 0}, {0.1, 0.2}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)calibrate_rate_constant({10, 20}, {0.1, -0.2}),
                  std::invalid_argument);
}
