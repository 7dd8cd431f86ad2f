#pragma once

#include <functional>
#include <span>
#include <vector>

namespace recq {

enum class LawKind { GaussianMixture, ShiftedChi2Affine, Dirac };

struct GaussianComponent {
  double weight;
  double mean;
  double sd;  // 0 gives a point mass at mean
};

// One-dimensional transition law: a finite Gaussian mixture (point masses
// allowed via sd = 0), the law of offset + scale*(Z + c)^2 for Z ~ N(0,1)
// with either sign of scale, or a single point mass.
struct ScalarLaw {
  LawKind kind = LawKind::Dirac;
  std::vector<GaussianComponent> components;  // GaussianMixture
  double offset = 0.0, scale = 0.0, c = 0.0;  // ShiftedChi2Affine
  double atom = 0.0;                          // Dirac
  double p = 3.0;  // exponent used by law_moments, must stay in (2,3]

  static ScalarLaw gaussian(double mean, double sd);
  static ScalarLaw mixture(std::vector<GaussianComponent> comps);
  static ScalarLaw shifted_chi2_affine(double offset, double scale, double c);
  static ScalarLaw dirac(double x);
};

struct LawMoments {
  double mean;
  double variance;
  double pth_abs_moment;
  double p;
};

double law_cdf(const ScalarLaw& law, double y);

// E[Y 1{a < Y <= b}]; throws std::invalid_argument if a > b.
double law_partial_first_moment(const ScalarLaw& law, double a, double b);

// E[Y^2 1{a < Y <= b}].
double law_partial_second_moment(const ScalarLaw& law, double a, double b);

// Throws std::domain_error when y carries a point mass.
double law_density(const ScalarLaw& law, double y);

// Exact mean/variance; p-th absolute moment by adaptive quadrature
// (rel. tol 1e-9) with atoms added in closed form.
LawMoments law_moments(const ScalarLaw& law);

double law_mean(const ScalarLaw& law);
double law_second_moment(const ScalarLaw& law);

// Everything the grid optimizer needs from a law. batch fills the cdf, the
// cumulative first and second partial moments, and the density at each of the
// given sorted points (+-infinity allowed; density entries are 0 there and at
// points carrying an atom).
struct LawView {
  std::function<void(std::span<const double> pts, double* F, double* M1, double* M2,
                     double* f)>
      batch;
  double mean = 0.0;
  double second_moment = 0.0;
  double lo = 0.0, hi = 0.0;  // bracket holding all but ~1e-15 of the mass
  bool has_atoms = false;
};

LawView law_view(const ScalarLaw& law);

// Law view of the finite mixture sum_i weights[i] * laws[i]; weights must be
// nonnegative and sum to 1 within 1e-10.
LawView mixture_law_view(std::span<const double> weights, std::span<const ScalarLaw> laws);

// Cdf of one law at each of the given sorted points (+-infinity allowed);
// cheaper than LawView::batch when only the cdf is needed.
void law_cdf_batch(const ScalarLaw& law, std::span<const double> pts, double* F);

}  // namespace recq
