#include "recq/scalar_laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "recq/special_functions.hpp"

namespace recq {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kTailZ = 12.0;  // |Z| beyond this carries ~1e-33 of the mass

double phi0(double t) { return 0.5 * std::erfc(-t * kInvSqrt2); }
double phi(double t) { return kInvSqrt2Pi * std::exp(-0.5 * t * t); }

void check_interval(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) throw std::invalid_argument("partial moment: NaN endpoint");
  if (a > b) throw std::invalid_argument("partial moment: a > b");
}

// Density of W = (Z+c)^2 at w > 0.
double chi2_density(double c, double w) {
  if (w <= 0.0) return 0.0;
  const double s = std::sqrt(w);
  return (phi(s - c) + phi(s + c)) / (2.0 * s);
}

// Cumulative E[W^2 1{W <= w}] wrappers keep call sites short.
double chi2_F(double c, double w) { return shifted_chi2_cdf(c, w); }
double chi2_M1(double c, double w) { return shifted_chi2_partial_first_moment(c, w); }
double chi2_M2(double c, double w) { return shifted_chi2_partial_second_moment(c, w); }

double adaptive_simpson_rec(const std::function<double(double)>& g, double a, double b,
                            double fa, double fm, double fb, double whole, double tol,
                            int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = g(lm), frm = g(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_rec(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& g, double a, double b, double tol) {
  if (!(a < b)) return 0.0;
  const double fa = g(a), fb = g(b), fm = g(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(g, a, b, fa, fm, fb, whole, tol, 48);
}

// Integrates g over [a, b] split at the interior points in cuts (sorted).
double integrate_split(const std::function<double(double)>& g, double a, double b,
                       std::vector<double> cuts, double tol) {
  cuts.erase(std::remove_if(cuts.begin(), cuts.end(),
                            [&](double x) { return !(x > a && x < b); }),
             cuts.end());
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0, left = a;
  for (double x : cuts) {
    total += adaptive_simpson(g, left, x, tol);
    left = x;
  }
  return total + adaptive_simpson(g, left, b, tol);
}

// Flattened component lists driving every batch evaluation.
struct FlatMixture {
  // Gaussian components with sd > 0
  std::vector<double> gw, gmu, gsd;
  // point masses
  std::vector<double> aw, ax;
  // shifted chi-square affine components
  std::vector<double> cw, coff, cscale, cc;
};

void flatten_into(const ScalarLaw& law, double weight, FlatMixture& out) {
  switch (law.kind) {
    case LawKind::GaussianMixture:
      for (const auto& comp : law.components) {
        if (comp.sd > 0.0) {
          out.gw.push_back(weight * comp.weight);
          out.gmu.push_back(comp.mean);
          out.gsd.push_back(comp.sd);
        } else {
          out.aw.push_back(weight * comp.weight);
          out.ax.push_back(comp.mean);
        }
      }
      break;
    case LawKind::ShiftedChi2Affine:
      out.cw.push_back(weight);
      out.coff.push_back(law.offset);
      out.cscale.push_back(law.scale);
      out.cc.push_back(law.c);
      break;
    case LawKind::Dirac:
      out.aw.push_back(weight);
      out.ax.push_back(law.atom);
      break;
  }
}

void batch_eval(const FlatMixture& mix, std::span<const double> pts, double* F, double* M1,
                double* M2, double* f) {
  const size_t n = pts.size();
  std::fill(F, F + n, 0.0);
  std::fill(M1, M1 + n, 0.0);
  std::fill(M2, M2 + n, 0.0);
  std::fill(f, f + n, 0.0);
  for (size_t i = 0; i < mix.gw.size(); ++i) {
    const double w = mix.gw[i], mu = mix.gmu[i], sd = mix.gsd[i];
    const double inv = 1.0 / sd;
    for (size_t j = 0; j < n; ++j) {
      const double y = pts[j];
      double P, d, t;
      if (std::isinf(y)) {
        P = y > 0.0 ? 1.0 : 0.0;
        d = 0.0;
        t = 0.0;
      } else {
        t = (y - mu) * inv;
        P = phi0(t);
        d = phi(t);
      }
      F[j] += w * P;
      M1[j] += w * (mu * P - sd * d);
      M2[j] += w * ((mu * mu + sd * sd) * P - (2.0 * mu * sd + sd * sd * t) * d);
      f[j] += w * inv * d;
    }
  }
  for (size_t i = 0; i < mix.cw.size(); ++i) {
    const double w = mix.cw[i], off = mix.coff[i], s = mix.cscale[i], c = mix.cc[i];
    const double EW = 1.0 + c * c;
    const double EW2 = 3.0 + 6.0 * c * c + c * c * c * c;
    const double mean = off + s * EW;
    const double m2 = off * off + 2.0 * off * s * EW + s * s * EW2;
    for (size_t j = 0; j < n; ++j) {
      const double y = pts[j];
      if (std::isinf(y)) {
        const bool hi = y > 0.0;
        F[j] += hi ? w : 0.0;
        M1[j] += hi ? w * mean : 0.0;
        M2[j] += hi ? w * m2 : 0.0;
        continue;
      }
      const double wq = (y - off) / s;
      const double Fw = chi2_F(c, wq);
      const double P1 = chi2_M1(c, wq);
      const double P2 = chi2_M2(c, wq);
      const double cumF = s > 0.0 ? Fw : 1.0 - Fw;
      const double cumM1 =
          s > 0.0 ? off * Fw + s * P1 : mean - (off * Fw + s * P1);
      const double cumM2 = s > 0.0
                               ? off * off * Fw + 2.0 * off * s * P1 + s * s * P2
                               : m2 - (off * off * Fw + 2.0 * off * s * P1 + s * s * P2);
      F[j] += w * cumF;
      M1[j] += w * cumM1;
      M2[j] += w * cumM2;
      f[j] += w * chi2_density(c, wq) / std::abs(s);
    }
  }
  for (size_t i = 0; i < mix.aw.size(); ++i) {
    const double w = mix.aw[i], x = mix.ax[i];
    for (size_t j = 0; j < n; ++j) {
      const double y = pts[j];
      const bool in = std::isinf(y) ? y > 0.0 : x <= y;
      if (in) {
        F[j] += w;
        M1[j] += w * x;
        M2[j] += w * x * x;
      }
    }
  }
}

void bracket_of(const ScalarLaw& law, double& lo, double& hi) {
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  switch (law.kind) {
    case LawKind::GaussianMixture:
      for (const auto& comp : law.components) {
        lo = std::min(lo, comp.mean - kTailZ * comp.sd);
        hi = std::max(hi, comp.mean + kTailZ * comp.sd);
      }
      break;
    case LawKind::ShiftedChi2Affine: {
      const double wmax = (kTailZ + std::abs(law.c)) * (kTailZ + std::abs(law.c));
      const double e0 = law.offset, e1 = law.offset + law.scale * wmax;
      lo = std::min(e0, e1);
      hi = std::max(e0, e1);
      break;
    }
    case LawKind::Dirac:
      lo = law.atom;
      hi = law.atom;
      break;
  }
  if (!(lo < hi)) {
    const double pad = std::max(1.0, std::abs(lo)) * 0.5;
    lo -= pad;
    hi += pad;
  }
}

void validate(const ScalarLaw& law) {
  switch (law.kind) {
    case LawKind::GaussianMixture: {
      if (law.components.empty())
        throw std::invalid_argument("ScalarLaw: empty mixture");
      double sum = 0.0;
      for (const auto& comp : law.components) {
        if (comp.weight < 0.0) throw std::invalid_argument("ScalarLaw: negative weight");
        if (comp.sd < 0.0) throw std::invalid_argument("ScalarLaw: negative sd");
        if (!std::isfinite(comp.mean) || !std::isfinite(comp.sd))
          throw std::invalid_argument("ScalarLaw: non-finite component");
        sum += comp.weight;
      }
      if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("ScalarLaw: mixture weights must sum to 1");
      break;
    }
    case LawKind::ShiftedChi2Affine:
      if (law.scale == 0.0 || !std::isfinite(law.scale) || !std::isfinite(law.offset) ||
          !std::isfinite(law.c))
        throw std::invalid_argument("ScalarLaw: invalid shifted chi-square parameters");
      break;
    case LawKind::Dirac:
      if (!std::isfinite(law.atom)) throw std::invalid_argument("ScalarLaw: non-finite atom");
      break;
  }
}

}  // namespace

ScalarLaw ScalarLaw::gaussian(double mean, double sd) {
  ScalarLaw law;
  law.kind = LawKind::GaussianMixture;
  law.components = {{1.0, mean, sd}};
  validate(law);
  return law;
}

ScalarLaw ScalarLaw::mixture(std::vector<GaussianComponent> comps) {
  ScalarLaw law;
  law.kind = LawKind::GaussianMixture;
  law.components = std::move(comps);
  validate(law);
  return law;
}

ScalarLaw ScalarLaw::shifted_chi2_affine(double offset, double scale, double c) {
  ScalarLaw law;
  law.kind = LawKind::ShiftedChi2Affine;
  law.offset = offset;
  law.scale = scale;
  law.c = c;
  validate(law);
  return law;
}

ScalarLaw ScalarLaw::dirac(double x) {
  ScalarLaw law;
  law.kind = LawKind::Dirac;
  law.atom = x;
  validate(law);
  return law;
}

double law_cdf(const ScalarLaw& law, double y) {
  if (std::isnan(y)) throw std::invalid_argument("law_cdf: NaN input");
  if (std::isinf(y)) return y > 0.0 ? 1.0 : 0.0;
  switch (law.kind) {
    case LawKind::GaussianMixture: {
      double F = 0.0;
      for (const auto& comp : law.components)
        F += comp.weight *
             (comp.sd > 0.0 ? std_normal_cdf((y - comp.mean) / comp.sd)
                            : (comp.mean <= y ? 1.0 : 0.0));
      return F;
    }
    case LawKind::ShiftedChi2Affine: {
      const double w = (y - law.offset) / law.scale;
      return law.scale > 0.0 ? chi2_F(law.c, w) : 1.0 - chi2_F(law.c, w);
    }
    case LawKind::Dirac:
      return law.atom <= y ? 1.0 : 0.0;
  }
  return 0.0;
}

double law_partial_first_moment(const ScalarLaw& law, double a, double b) {
  check_interval(a, b);
  switch (law.kind) {
    case LawKind::GaussianMixture: {
      double v = 0.0;
      for (const auto& comp : law.components)
        v += comp.weight * gaussian_partial_first_moment(comp.mean, comp.sd, a, b);
      return v;
    }
    case LawKind::ShiftedChi2Affine: {
      const double s = law.scale, off = law.offset, c = law.c;
      double wl = (a - off) / s, wh = (b - off) / s;
      if (s < 0.0) std::swap(wl, wh);
      const double dF = chi2_F(c, wh) - chi2_F(c, wl);
      const double dM = chi2_M1(c, wh) - chi2_M1(c, wl);
      return off * dF + s * dM;
    }
    case LawKind::Dirac:
      return (a < law.atom && law.atom <= b) ? law.atom : 0.0;
  }
  return 0.0;
}

double law_partial_second_moment(const ScalarLaw& law, double a, double b) {
  check_interval(a, b);
  switch (law.kind) {
    case LawKind::GaussianMixture: {
      double v = 0.0;
      for (const auto& comp : law.components)
        v += comp.weight * gaussian_partial_second_moment(comp.mean, comp.sd, a, b);
      return v;
    }
    case LawKind::ShiftedChi2Affine: {
      const double s = law.scale, off = law.offset, c = law.c;
      double wl = (a - off) / s, wh = (b - off) / s;
      if (s < 0.0) std::swap(wl, wh);
      const double dF = chi2_F(c, wh) - chi2_F(c, wl);
      const double dM1 = chi2_M1(c, wh) - chi2_M1(c, wl);
      const double dM2 = chi2_M2(c, wh) - chi2_M2(c, wl);
      return off * off * dF + 2.0 * off * s * dM1 + s * s * dM2;
    }
    case LawKind::Dirac: {
      const double x = law.atom;
      return (a < x && x <= b) ? x * x : 0.0;
    }
  }
  return 0.0;
}

double law_density(const ScalarLaw& law, double y) {
  if (!std::isfinite(y)) throw std::invalid_argument("law_density: non-finite input");
  switch (law.kind) {
    case LawKind::GaussianMixture: {
      double d = 0.0;
      for (const auto& comp : law.components) {
        if (comp.sd > 0.0) {
          d += comp.weight / comp.sd * std_normal_pdf((y - comp.mean) / comp.sd);
        } else if (comp.mean == y && comp.weight > 0.0) {
          throw std::domain_error("law_density: point mass at evaluation point");
        }
      }
      return d;
    }
    case LawKind::ShiftedChi2Affine: {
      const double w = (y - law.offset) / law.scale;
      return chi2_density(law.c, w) / std::abs(law.scale);
    }
    case LawKind::Dirac:
      if (law.atom == y) throw std::domain_error("law_density: point mass at evaluation point");
      return 0.0;
  }
  return 0.0;
}

double law_mean(const ScalarLaw& law) {
  switch (law.kind) {
    case LawKind::GaussianMixture: {
      double m = 0.0;
      for (const auto& comp : law.components) m += comp.weight * comp.mean;
      return m;
    }
    case LawKind::ShiftedChi2Affine:
      return law.offset + law.scale * (1.0 + law.c * law.c);
    case LawKind::Dirac:
      return law.atom;
  }
  return 0.0;
}

double law_second_moment(const ScalarLaw& law) {
  switch (law.kind) {
    case LawKind::GaussianMixture: {
      double m2 = 0.0;
      for (const auto& comp : law.components)
        m2 += comp.weight * (comp.mean * comp.mean + comp.sd * comp.sd);
      return m2;
    }
    case LawKind::ShiftedChi2Affine: {
      const double c2 = law.c * law.c;
      const double EW = 1.0 + c2;
      const double EW2 = 3.0 + 6.0 * c2 + c2 * c2;
      return law.offset * law.offset + 2.0 * law.offset * law.scale * EW +
             law.scale * law.scale * EW2;
    }
    case LawKind::Dirac:
      return law.atom * law.atom;
  }
  return 0.0;
}

LawMoments law_moments(const ScalarLaw& law) {
  const double p = law.p;
  if (!(p > 2.0 && p <= 3.0)) throw std::invalid_argument("law_moments: p outside (2,3]");
  LawMoments out;
  out.p = p;
  out.mean = law_mean(law);
  out.variance = std::max(0.0, law_second_moment(law) - out.mean * out.mean);
  const double tol = 1e-12;
  double moment = 0.0;
  switch (law.kind) {
    case LawKind::GaussianMixture:
      for (const auto& comp : law.components) {
        if (comp.sd == 0.0) {
          moment += comp.weight * std::pow(std::abs(comp.mean), p);
          continue;
        }
        const double mu = comp.mean, sd = comp.sd;
        auto g = [&](double z) { return std::pow(std::abs(mu + sd * z), p) * phi(z); };
        moment += comp.weight * integrate_split(g, -kTailZ - 2.0, kTailZ + 2.0, {-mu / sd}, tol);
      }
      break;
    case LawKind::ShiftedChi2Affine: {
      const double off = law.offset, s = law.scale, c = law.c;
      auto g = [&](double z) {
        const double t = z + c;
        return std::pow(std::abs(off + s * t * t), p) * phi(z);
      };
      std::vector<double> cuts;
      const double root2 = -off / s;
      if (root2 > 0.0) {
        const double r = std::sqrt(root2);
        cuts = {r - c, -r - c};
      }
      moment = integrate_split(g, -kTailZ - 2.0 - std::abs(c), kTailZ + 2.0 + std::abs(c),
                               std::move(cuts), tol);
      break;
    }
    case LawKind::Dirac:
      moment = std::pow(std::abs(law.atom), p);
      break;
  }
  out.pth_abs_moment = moment;
  return out;
}

LawView law_view(const ScalarLaw& law) {
  validate(law);
  FlatMixture mix;
  flatten_into(law, 1.0, mix);
  LawView view;
  view.mean = law_mean(law);
  view.second_moment = law_second_moment(law);
  bracket_of(law, view.lo, view.hi);
  view.has_atoms = !mix.aw.empty();
  view.batch = [mix = std::move(mix)](std::span<const double> pts, double* F, double* M1,
                                      double* M2, double* f) {
    batch_eval(mix, pts, F, M1, M2, f);
  };
  return view;
}

LawView mixture_law_view(std::span<const double> weights, std::span<const ScalarLaw> laws) {
  if (weights.size() != laws.size() || laws.empty())
    throw std::invalid_argument("mixture_law_view: size mismatch");
  double sum = 0.0;
  FlatMixture mix;
  LawView view;
  view.lo = std::numeric_limits<double>::infinity();
  view.hi = -view.lo;
  for (size_t i = 0; i < laws.size(); ++i) {
    if (weights[i] < 0.0) throw std::invalid_argument("mixture_law_view: negative weight");
    sum += weights[i];
    validate(laws[i]);
    flatten_into(laws[i], weights[i], mix);
    view.mean += weights[i] * law_mean(laws[i]);
    view.second_moment += weights[i] * law_second_moment(laws[i]);
    if (weights[i] > 0.0) {
      double lo, hi;
      bracket_of(laws[i], lo, hi);
      view.lo = std::min(view.lo, lo);
      view.hi = std::max(view.hi, hi);
    }
  }
  if (std::abs(sum - 1.0) > 1e-10)
    throw std::invalid_argument("mixture_law_view: weights must sum to 1");
  view.has_atoms = !mix.aw.empty();
  view.batch = [mix = std::move(mix)](std::span<const double> pts, double* F, double* M1,
                                      double* M2, double* f) {
    batch_eval(mix, pts, F, M1, M2, f);
  };
  return view;
}

void law_cdf_batch(const ScalarLaw& law, std::span<const double> pts, double* F) {
  const size_t n = pts.size();
  std::fill(F, F + n, 0.0);
  switch (law.kind) {
    case LawKind::GaussianMixture:
      for (const auto& comp : law.components) {
        if (comp.sd > 0.0) {
          const double inv = 1.0 / comp.sd;
          for (size_t j = 0; j < n; ++j) {
            const double y = pts[j];
            F[j] += comp.weight *
                    (std::isinf(y) ? (y > 0.0 ? 1.0 : 0.0) : phi0((y - comp.mean) * inv));
          }
        } else {
          for (size_t j = 0; j < n; ++j) {
            const double y = pts[j];
            const bool in = std::isinf(y) ? y > 0.0 : comp.mean <= y;
            if (in) F[j] += comp.weight;
          }
        }
      }
      break;
    default:
      for (size_t j = 0; j < n; ++j) F[j] = law_cdf(law, pts[j]);
      break;
  }
}

}  // namespace recq
