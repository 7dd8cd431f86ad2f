#include "recq/schemes.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace recq {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Distribution of the sum of `count` iid draws from (atoms, weights),
// enumerated as a product mixture.
void convolve_atoms(const std::vector<double>& atoms, const std::vector<double>& weights,
                    std::vector<double>& sums, std::vector<double>& sum_weights) {
  std::vector<double> next_sums, next_weights;
  next_sums.reserve(sums.size() * atoms.size());
  next_weights.reserve(sums.size() * atoms.size());
  for (std::size_t i = 0; i < sums.size(); ++i) {
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      next_sums.push_back(sums[i] + atoms[a]);
      next_weights.push_back(sum_weights[i] * weights[a]);
    }
  }
  sums = std::move(next_sums);
  sum_weights = std::move(next_weights);
}

}  // namespace

PreparedScheme prepare_scheme(const SchemeSpec& spec) {
  require(std::isfinite(spec.x0), "scheme: x0 must be finite");
  require(spec.n >= 1, "scheme: n must be >= 1");
  require(spec.T > 0.0 && std::isfinite(spec.T), "scheme: T must be positive");
  require(static_cast<bool>(spec.drift), "scheme: drift coefficient missing");
  require(static_cast<bool>(spec.diffusion), "scheme: diffusion coefficient missing");

  PreparedScheme s;
  s.spec = spec;
  s.h = spec.h();

  switch (spec.kind) {
    case SchemeKind::Euler:
      break;
    case SchemeKind::Milstein:
      require(static_cast<bool>(spec.diffusion_d1), "scheme: milstein needs sigma'");
      break;
    case SchemeKind::Taylor20:
      require(static_cast<bool>(spec.drift_d1), "scheme: taylor20 needs b'");
      require(static_cast<bool>(spec.drift_d2), "scheme: taylor20 needs b''");
      require(static_cast<bool>(spec.diffusion_d1), "scheme: taylor20 needs sigma'");
      require(static_cast<bool>(spec.diffusion_d2), "scheme: taylor20 needs sigma''");
      break;
    case SchemeKind::JumpEuler: {
      require(static_cast<bool>(spec.jump_coeff), "scheme: jump coefficient missing");
      require(spec.intensity >= 0.0 && std::isfinite(spec.intensity),
              "scheme: intensity must be >= 0");
      s.count_weights =
          jump_count_weights(spec.intensity, s.h, spec.jump_mode, spec.m_max);
      s.mark_mean = spec.size_law.mean();
      if (spec.size_law.kind == JumpSizeKind::Gaussian) {
        s.gaussian_marks = true;
        s.mark_loc = spec.size_law.mean_jump;
        s.mark_scale = spec.size_law.theta;
      } else if (spec.size_law.kind == JumpSizeKind::Empirical) {
        s.mark_atoms = spec.size_law.atoms;
        s.mark_weights = spec.size_law.weights;
      } else {
        require(spec.nu_level >= 1, "scheme: nu_level must be >= 1");
        const JumpSizeLaw q = quantize_jump_law(spec.size_law, spec.nu_level);
        s.mark_atoms = q.atoms;
        s.mark_weights = q.weights;
      }
      break;
    }
  }
  return s;
}

ScalarLaw step_law(const PreparedScheme& s, int k, double x) {
  const SchemeSpec& spec = s.spec;
  const double h = s.h;
  const double t = static_cast<double>(k) * h;
  const double bv = spec.drift(t, x);
  const double sv = spec.diffusion(t, x);
  const double sqh = std::sqrt(h);

  switch (spec.kind) {
    case SchemeKind::Euler:
      return ScalarLaw::gaussian(x + h * bv, sqh * std::abs(sv));

    case SchemeKind::Milstein: {
      const double sp = spec.diffusion_d1(x);
      const double ss = sv * sp;
      if (ss == 0.0) return ScalarLaw::gaussian(x + h * bv, sqh * std::abs(sv));
      const double scale = 0.5 * h * ss;
      const double c = 1.0 / (sp * sqh);
      const double offset = x + h * bv - sv / (2.0 * sp) - scale;
      return ScalarLaw::shifted_chi2_affine(offset, scale, c);
    }

    case SchemeKind::Taylor20: {
      const double b1 = spec.drift_d1(x);
      const double b2 = spec.drift_d2(x);
      const double s1 = spec.diffusion_d1(x);
      const double s2 = spec.diffusion_d2(x);
      const double bt = bv * b1 + 0.5 * sv * sv * b2;
      const double st = b1 * sv + bv * s1 + 0.5 * s2 * sv * sv;
      const double B = h * bv + 0.5 * h * h * bt;
      const double C = sqh * sv + 0.5 * h * sqh * st;
      const double D = 0.5 * sv * s1 * h;
      if (D == 0.0) return ScalarLaw::gaussian(x + B, std::abs(C));
      const double offset = x + B - D - C * C / (4.0 * D);
      return ScalarLaw::shifted_chi2_affine(offset, D, C / (2.0 * D));
    }

    case SchemeKind::JumpEuler: {
      const double gv = spec.jump_coeff(x);
      const double drift_part =
          x + h * bv - spec.intensity * h * s.mark_mean * gv;  // compensated
      const double base_var = h * sv * sv;
      std::vector<GaussianComponent> comps;
      if (s.gaussian_marks) {
        comps.reserve(s.count_weights.size());
        for (std::size_t m = 0; m < s.count_weights.size(); ++m) {
          const double md = static_cast<double>(m);
          comps.push_back(
              {s.count_weights[m], drift_part + md * s.mark_loc * gv,
               std::sqrt(base_var + md * s.mark_scale * s.mark_scale * gv * gv)});
        }
      } else {
        const double sd = std::sqrt(base_var);
        comps.push_back({s.count_weights[0], drift_part, sd});
        std::vector<double> sums{0.0}, sw{1.0};
        for (std::size_t m = 1; m < s.count_weights.size(); ++m) {
          convolve_atoms(s.mark_atoms, s.mark_weights, sums, sw);
          for (std::size_t i = 0; i < sums.size(); ++i) {
            comps.push_back(
                {s.count_weights[m] * sw[i], drift_part + sums[i] * gv, sd});
          }
        }
      }
      return ScalarLaw::mixture(std::move(comps));
    }
  }
  throw std::logic_error("unreachable");
}

double simulate_step(const PreparedScheme& s, int k, double x, RngStream& rng) {
  const SchemeSpec& spec = s.spec;
  const double h = s.h;
  const double t = static_cast<double>(k) * h;
  const double bv = spec.drift(t, x);
  const double sv = spec.diffusion(t, x);
  const double sqh = std::sqrt(h);
  const double z = rng.normal();

  switch (spec.kind) {
    case SchemeKind::Euler:
      return x + h * bv + sqh * sv * z;

    case SchemeKind::Milstein: {
      const double sp = spec.diffusion_d1(x);
      return x + h * bv + sqh * sv * z + 0.5 * sv * sp * h * (z * z - 1.0);
    }

    case SchemeKind::Taylor20: {
      const double b1 = spec.drift_d1(x);
      const double b2 = spec.drift_d2(x);
      const double s1 = spec.diffusion_d1(x);
      const double s2 = spec.diffusion_d2(x);
      const double bt = bv * b1 + 0.5 * sv * sv * b2;
      const double st = b1 * sv + bv * s1 + 0.5 * s2 * sv * sv;
      const double B = h * bv + 0.5 * h * h * bt;
      const double C = sqh * sv + 0.5 * h * sqh * st;
      const double D = 0.5 * sv * s1 * h;
      return x + B + C * z + D * (z * z - 1.0);
    }

    case SchemeKind::JumpEuler: {
      const double gv = spec.jump_coeff(x);
      double next = x + h * bv + sqh * sv * z -
                    spec.intensity * h * s.mark_mean * gv;
      const double u = rng.uniform();
      std::size_t count = s.count_weights.size() - 1;
      double acc = 0.0;
      for (std::size_t m = 0; m < s.count_weights.size(); ++m) {
        acc += s.count_weights[m];
        if (u <= acc) {
          count = m;
          break;
        }
      }
      for (std::size_t i = 0; i < count; ++i) {
        next += sample_jump_size(spec.size_law, rng) * gv;
      }
      return next;
    }
  }
  throw std::logic_error("unreachable");
}

KeyLemmaCoeffs key_lemma_coeffs(const CoefficientInputs& in, double h) {
  if (!(in.p > 2.0 && in.p <= 3.0)) {
    throw std::invalid_argument("key_lemma_coeffs: p must lie in (2, 3]");
  }
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw std::invalid_argument("key_lemma_coeffs: h must be > 0");
  }
  if (!(in.lin_growth >= 0.0) || !(in.upsilon >= 0.0) || !(in.innovation_abs_p >= 0.0)) {
    throw std::invalid_argument("key_lemma_coeffs: constants must be >= 0");
  }
  const double p = in.p;
  KeyLemmaCoeffs out;
  out.kappa_p = 0.5 * (p - 1.0) * (p - 2.0) + 2.0 * p * in.lin_growth;
  out.K_p = std::pow(2.0, p - 1.0) * std::pow(in.upsilon, p) *
            (1.0 + p + std::pow(h, 0.5 * p - 1.0)) * in.innovation_abs_p;
  const double ekh = std::exp(out.kappa_p * h);
  out.alpha = (ekh * in.lin_growth + out.K_p) * h;
  out.beta = 1.0 + (out.kappa_p * ekh + out.K_p) * h;
  return out;
}

double scheme_lipschitz(const SchemeSpec& spec, const LipschitzInputs& lip) {
  const double h = spec.h();
  require(h > 0.0 && std::isfinite(h), "scheme_lipschitz: h must be > 0");
  switch (spec.kind) {
    case SchemeKind::Euler: {
      const double a = 1.0 + h * lip.b_lip;
      return std::sqrt(a * a + h * lip.sigma_lip * lip.sigma_lip);
    }
    case SchemeKind::JumpEuler: {
      const double a = 1.0 + h * lip.b_lip;
      const double eu2 = spec.size_law.second_moment();
      return std::sqrt(a * a + h * (lip.sigma_lip * lip.sigma_lip +
                                    spec.intensity * eu2 * lip.gamma_lip * lip.gamma_lip));
    }
    case SchemeKind::Milstein: {
      const double a = 1.0 + h * lip.b_lip;
      return std::sqrt(a * a + h * lip.sigma_lip * lip.sigma_lip +
                       0.5 * h * h * lip.sigsig_lip * lip.sigsig_lip);
    }
    case SchemeKind::Taylor20: {
      const double a = 1.0 + h * lip.b_lip + 0.5 * h * h * lip.btilde_lip;
      const double c = lip.sigma_lip + 0.5 * h * lip.sigtilde_lip;
      return std::sqrt(a * a + h * c * c + 0.5 * h * h * lip.sigsig_lip * lip.sigsig_lip);
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace recq
