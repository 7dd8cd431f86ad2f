#include <stdexcept>
#include <cmath>
#include <limits>

#include <doctest.h>

#include "oracle_helpers.hpp"
#include "recq/special_functions.hpp"

using namespace recq;
constexpr double kInf = std::numeric_limits<double>::infinity();

TEST_CASE("standard normal cdf at frozen reference points") {
  CHECK(std_normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std_normal_cdf(1.0) == doctest::Approx(0.841344746068543).epsilon(1e-13));
  CHECK(std_normal_cdf(0.37) == doctest::Approx(0.6443087548005468).epsilon(1e-13));
  CHECK_THROWS_AS(std_normal_cdf(-kInf), std::domain_error);
  CHECK_THROWS_AS(std_normal_cdf(kInf), std::domain_error);
  CHECK_THROWS_AS(std_normal_cdf(std::numeric_limits<double>::quiet_NaN()),
                  std::domain_error);
  CHECK(std_normal_cdf(-40.0) == doctest::Approx(0.0).epsilon(1e-300));
  CHECK(std_normal_cdf(40.0) == 1.0);
}

TEST_CASE("standard normal cdf symmetry") {
  for (double x : {0.1, 0.5, 1.3, 2.7, 5.0, 8.0}) {
    CHECK(std_normal_cdf(-x) + std_normal_cdf(x) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("standard normal pdf at frozen reference points") {
  CHECK(std_normal_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
  CHECK(std_normal_pdf(1.3) == doctest::Approx(0.17136859204780736).epsilon(1e-14));
  CHECK(std_normal_pdf(3.0) == doctest::Approx(0.0044318484119380).epsilon(1e-12));
  CHECK(std_normal_pdf(5.0) == doctest::Approx(1.48671951473430e-6).epsilon(1e-12));
}

TEST_CASE("quantile inverts the cdf") {
  CHECK(std_normal_quantile(0.25) ==
        doctest::Approx(-0.6744897501960817).epsilon(1e-13));
  CHECK(std_normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  for (double u : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-9}) {
    CHECK(std_normal_cdf(std_normal_quantile(u)) == doctest::Approx(u).epsilon(1e-12));
  }
  for (double x : {-7.0, -2.2, 0.0, 0.9, 4.5}) {
    CHECK(std_normal_quantile(std_normal_cdf(x)) == doctest::Approx(x).epsilon(1e-10));
  }
  CHECK_THROWS_AS((void)std_normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS((void)std_normal_quantile(1.0), std::domain_error);
  CHECK_THROWS_AS((void)std_normal_quantile(-0.5), std::domain_error);
}

TEST_CASE("gaussian partial first moment against frozen references") {
  // E[Y 1{-inf < Y <= 0}] for Y ~ N(0,1) equals -pdf(0).
  CHECK(gaussian_partial_first_moment(0.0, 1.0, -kInf, 0.0) ==
        doctest::Approx(-0.3989422804014327).epsilon(1e-14));
  CHECK(gaussian_partial_first_moment(1.5, 2.0, -1.0, 3.0) ==
        doctest::Approx(0.7646076174028498).epsilon(1e-13));
  // Full-line integral is the mean.
  CHECK(gaussian_partial_first_moment(1.5, 2.0, -kInf, kInf) ==
        doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("gaussian partial second moment against frozen references") {
  CHECK(gaussian_partial_second_moment(1.5, 2.0, -1.0, 3.0) ==
        doctest::Approx(1.6456801582225107).epsilon(1e-13));
  CHECK(gaussian_partial_second_moment(1.5, 2.0, -kInf, kInf) ==
        doctest::Approx(1.5 * 1.5 + 4.0).epsilon(1e-14));
}

TEST_CASE("gaussian partial moments match independent quadrature") {
  const double cases[][4] = {
      {0.0, 1.0, -0.5, 0.8},  {2.0, 0.3, 1.5, 2.5},   {-1.0, 2.5, -4.0, 0.0},
      {5.0, 0.05, 4.9, 5.05}, {0.7, 1.7, -2.0, -1.0},
  };
  for (const auto& c : cases) {
    const double mu = c[0], sd = c[1], a = c[2], b = c[3];
    auto m1 = [=](double y) {
      return y * testor::ref_normal_pdf((y - mu) / sd) / sd;
    };
    auto m2 = [=](double y) {
      return y * y * testor::ref_normal_pdf((y - mu) / sd) / sd;
    };
    CHECK(gaussian_partial_first_moment(mu, sd, a, b) ==
          doctest::Approx(testor::integrate(m1, a, b)).epsilon(1e-11));
    CHECK(gaussian_partial_second_moment(mu, sd, a, b) ==
          doctest::Approx(testor::integrate(m2, a, b)).epsilon(1e-11));
  }
}

TEST_CASE("gaussian partial moments are additive over a split point") {
  const double mu = 0.4, sd = 1.3;
  const double whole = gaussian_partial_first_moment(mu, sd, -2.0, 3.0);
  const double parts = gaussian_partial_first_moment(mu, sd, -2.0, 0.7) +
                       gaussian_partial_first_moment(mu, sd, 0.7, 3.0);
  CHECK(whole == doctest::Approx(parts).epsilon(1e-14));
}

TEST_CASE("zero-sd gaussian moments use the half-open atom convention") {
  // Atom at 2: counted when a < 2 <= b.
  CHECK(gaussian_partial_first_moment(2.0, 0.0, 1.0, 2.0) == 2.0);
  CHECK(gaussian_partial_first_moment(2.0, 0.0, 2.0, 3.0) == 0.0);
  CHECK(gaussian_partial_first_moment(2.0, 0.0, 1.0, 1.5) == 0.0);
  CHECK(gaussian_partial_second_moment(2.0, 0.0, 1.0, 2.0) == 4.0);
  CHECK(gaussian_partial_second_moment(2.0, 0.0, 2.0, 3.0) == 0.0);
}

TEST_CASE("partial moments reject inverted intervals and negative sd") {
  CHECK_THROWS_AS((void)gaussian_partial_first_moment(0.0, 1.0, 1.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)gaussian_partial_second_moment(0.0, -1.0, 0.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("shifted chi-square cdf at frozen reference points") {
  // P(Z^2 <= 1) = P(-1 <= Z <= 1).
  CHECK(shifted_chi2_cdf(0.0, 1.0) ==
        doctest::Approx(0.6826894921370859).epsilon(1e-13));
  CHECK(shifted_chi2_cdf(2.0, 3.0) ==
        doctest::Approx(0.3942742502016332).epsilon(1e-13));
  CHECK(shifted_chi2_cdf(1.0, 0.0) == 0.0);
  CHECK(shifted_chi2_cdf(1.0, -2.0) == 0.0);
  CHECK(shifted_chi2_cdf(1.0, kInf) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("shifted chi-square cdf matches its density by quadrature") {
  for (double c : {0.0, 0.7, 2.0, -1.3}) {
    for (double y : {0.5, 1.0, 4.0}) {
      // Density of W = (Z + c)^2 integrated after substituting t = s^2, which
      // removes the 1/sqrt(t) endpoint singularity:
      //   int_0^y [phi(sqrt(t)-c)+phi(sqrt(t)+c)]/(2 sqrt(t)) dt
      //     = int_0^sqrt(y) [phi(s-c)+phi(s+c)] ds.
      auto dens = [=](double s) {
        return testor::ref_normal_pdf(s - c) + testor::ref_normal_pdf(s + c);
      };
      const double want = testor::integrate(dens, 0.0, std::sqrt(y), 1e-13);
      CHECK(shifted_chi2_cdf(c, y) == doctest::Approx(want).epsilon(1e-9));
      CHECK(shifted_chi2_cdf(-c, y) == doctest::Approx(shifted_chi2_cdf(c, y)).epsilon(1e-15));
    }
  }
}

TEST_CASE("shifted chi-square partial first moment at frozen reference points") {
  CHECK(shifted_chi2_partial_first_moment(0.0, 1.0) ==
        doctest::Approx(0.1987480430987992).epsilon(1e-13));
  CHECK(shifted_chi2_partial_first_moment(2.0, 3.0) ==
        doctest::Approx(0.5350995884289984).epsilon(1e-13));
  // Total first moment is E[(Z+c)^2] = 1 + c^2.
  CHECK(shifted_chi2_partial_first_moment(2.0, kInf) ==
        doctest::Approx(5.0).epsilon(1e-13));
  CHECK(shifted_chi2_partial_first_moment(0.0, kInf) ==
        doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("shifted chi-square partial second moment totals") {
  // E[W^2] = Var(W) + (E W)^2 with Var = 4c^2 + 2 and E W = 1 + c^2.
  for (double c : {0.0, 0.5, 1.7}) {
    const double ew = 1.0 + c * c;
    const double want = (4.0 * c * c + 2.0) + ew * ew;
    CHECK(shifted_chi2_partial_second_moment(c, kInf) ==
          doctest::Approx(want).epsilon(1e-12));
  }
  // Quadrature cross-check on a finite interval.
  const double c = 1.1, y = 2.5;
  auto m2 = [=](double t) {
    const double s = std::sqrt(t);
    return t * t * (testor::ref_normal_pdf(s - c) + testor::ref_normal_pdf(s + c)) /
           (2.0 * s);
  };
  CHECK(shifted_chi2_partial_second_moment(c, y) ==
        doctest::Approx(testor::integrate(m2, 1e-14, y, 1e-13)).epsilon(1e-9));
}
