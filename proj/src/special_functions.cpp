#include "recq/special_functions.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace recq {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw std::domain_error(std::string(what) + ": non-finite input");
}

// Partial raw moments of the standard normal over (a, b]:
//   integral of z^k phi(z) dz for k = 0..4, from the antiderivatives
//   -phi, -(z)phi - Phi0 style primitives. Endpoints may be +-infinity.
struct NormalCellMoments {
  double m0, m1, m2, m3, m4;
};

NormalCellMoments normal_cell_moments(double a, double b) {
  const double Fa = std::isinf(a) ? (a < 0 ? 0.0 : 1.0) : std_normal_cdf(a);
  const double Fb = std::isinf(b) ? (b < 0 ? 0.0 : 1.0) : std_normal_cdf(b);
  const double fa = std::isinf(a) ? 0.0 : std_normal_pdf(a);
  const double fb = std::isinf(b) ? 0.0 : std_normal_pdf(b);
  const double za = std::isinf(a) ? 0.0 : a;  // z^k * phi(z) -> 0 at +-infinity
  const double zb = std::isinf(b) ? 0.0 : b;
  NormalCellMoments m;
  m.m0 = Fb - Fa;
  m.m1 = fa - fb;
  m.m2 = m.m0 - (zb * fb - za * fa);
  m.m3 = (za * za + 2.0) * fa - (zb * zb + 2.0) * fb;
  m.m4 = 3.0 * m.m0 - (zb * zb * zb + 3.0 * zb) * fb + (za * za * za + 3.0 * za) * fa;
  return m;
}

}  // namespace

double std_normal_cdf(double x) {
  require_finite(x, "std_normal_cdf");
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

double std_normal_pdf(double x) {
  require_finite(x, "std_normal_pdf");
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double std_normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("std_normal_quantile: u outside (0,1)");
  // Acklam's rational approximation, then one Halley step on erfc.
  static const double A[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double B[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double C[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double D[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (u < plow) {
    double q = std::sqrt(-2.0 * std::log(u));
    x = (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5]) /
        ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0);
  } else if (u <= 1.0 - plow) {
    double q = u - 0.5, r = q * q;
    x = (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q /
        (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log1p(-u));
    x = -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5]) /
        ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0);
  }
  // Halley refinement against the cdf.
  double e = std_normal_cdf(x) - u;
  double d = std_normal_pdf(x);
  if (d > 0.0) {
    double t = e / d;
    x -= t / (1.0 + 0.5 * t * x);
  }
  return x;
}

double gaussian_partial_first_moment(double mean, double sd, double a, double b) {
  if (std::isnan(a) || std::isnan(b)) throw std::invalid_argument("partial moment: NaN endpoint");
  if (a > b) throw std::invalid_argument("partial moment: a > b");
  if (sd < 0.0) throw std::invalid_argument("partial moment: sd < 0");
  if (sd == 0.0) return (a < mean && mean <= b) ? mean : 0.0;
  const double at = std::isinf(a) ? a : (a - mean) / sd;
  const double bt = std::isinf(b) ? b : (b - mean) / sd;
  const NormalCellMoments m = normal_cell_moments(at, bt);
  return mean * m.m0 + sd * m.m1;
}

double gaussian_partial_second_moment(double mean, double sd, double a, double b) {
  if (std::isnan(a) || std::isnan(b)) throw std::invalid_argument("partial moment: NaN endpoint");
  if (a > b) throw std::invalid_argument("partial moment: a > b");
  if (sd < 0.0) throw std::invalid_argument("partial moment: sd < 0");
  if (sd == 0.0) return (a < mean && mean <= b) ? mean * mean : 0.0;
  const double at = std::isinf(a) ? a : (a - mean) / sd;
  const double bt = std::isinf(b) ? b : (b - mean) / sd;
  const NormalCellMoments m = normal_cell_moments(at, bt);
  return mean * mean * m.m0 + 2.0 * mean * sd * m.m1 + sd * sd * m.m2;
}

double shifted_chi2_cdf(double c, double y) {
  require_finite(c, "shifted_chi2_cdf");
  if (std::isnan(y)) throw std::domain_error("shifted_chi2_cdf: NaN input");
  if (y <= 0.0) return 0.0;
  if (std::isinf(y)) return 1.0;
  const double s = std::sqrt(y);
  return std_normal_cdf(s - c) - std_normal_cdf(-s - c);
}

double shifted_chi2_partial_first_moment(double c, double y) {
  require_finite(c, "shifted_chi2_partial_first_moment");
  if (std::isnan(y)) throw std::domain_error("shifted_chi2_partial_first_moment: NaN input");
  if (y <= 0.0) return 0.0;
  const double s = std::isinf(y) ? y : std::sqrt(y);
  const NormalCellMoments m = normal_cell_moments(-s - c, s - c);
  return m.m2 + 2.0 * c * m.m1 + c * c * m.m0;
}

double shifted_chi2_partial_second_moment(double c, double y) {
  require_finite(c, "shifted_chi2_partial_second_moment");
  if (std::isnan(y)) throw std::domain_error("shifted_chi2_partial_second_moment: NaN input");
  if (y <= 0.0) return 0.0;
  const double s = std::isinf(y) ? y : std::sqrt(y);
  const NormalCellMoments m = normal_cell_moments(-s - c, s - c);
  const double c2 = c * c;
  return m.m4 + 4.0 * c * m.m3 + 6.0 * c2 * m.m2 + 4.0 * c2 * c * m.m1 + c2 * c2 * m.m0;
}

}  // namespace recq
