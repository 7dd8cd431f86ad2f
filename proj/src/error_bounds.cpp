#include "recq/error_bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace recq {

namespace {

void check_common(const BoundCoefficients& c, const std::vector<int>& levels, int k) {
  if (!(c.p > 2.0 && c.p <= 3.0)) {
    throw std::invalid_argument("bounds: p must lie in (2, 3]");
  }
  if (c.d < 1) throw std::invalid_argument("bounds: d must be >= 1");
  if (!(c.c_dp > 0.0)) throw std::invalid_argument("bounds: rate constant must be > 0");
  if (k < 0) throw std::invalid_argument("bounds: step index must be >= 0");
  const std::size_t need = static_cast<std::size_t>(k) + 1;
  if (c.alpha.size() < need || c.beta.size() < need || c.lip.size() < need ||
      levels.size() < need) {
    throw std::invalid_argument("bounds: coefficient arrays shorter than step index");
  }
  for (std::size_t i = 0; i < need; ++i) {
    if (c.alpha[i] < 0.0 || c.beta[i] < 0.0 || c.lip[i] < 0.0) {
      throw std::invalid_argument("bounds: coefficients must be nonnegative");
    }
    if (levels[i] < 1) throw std::invalid_argument("bounds: levels must be >= 1");
  }
}

double double_sum(const BoundCoefficients& c, const std::vector<int>& levels, int k,
                  double inner_weight) {
  const double inv_p = 1.0 / c.p;
  const double inv_d = 1.0 / static_cast<double>(c.d);

  // lip_prod[i] = prod_{m=i+1..k} lip[m]; built backwards.
  std::vector<double> lip_prod(static_cast<std::size_t>(k) + 1);
  double lp = 1.0;
  for (int i = k; i >= 0; --i) {
    lip_prod[static_cast<std::size_t>(i)] = lp;
    if (i > 0) lp *= c.lip[static_cast<std::size_t>(i)];
  }

  double total = 0.0;
  double inner = 0.0;  // sum_{l<=i} alpha_l * prod_{m=l+1..i} (beta_m * inner_weight)
  for (int i = 0; i <= k; ++i) {
    if (i == 0) {
      inner = c.alpha[0];
    } else {
      inner = inner * c.beta[static_cast<std::size_t>(i)] * inner_weight +
              c.alpha[static_cast<std::size_t>(i)];
    }
    total += lip_prod[static_cast<std::size_t>(i)] * std::pow(inner, inv_p) *
             std::pow(static_cast<double>(levels[static_cast<std::size_t>(i)]), -inv_d);
  }
  return total;
}

}  // namespace

double regular_bound(const BoundCoefficients& c, const std::vector<int>& levels, int k) {
  check_common(c, levels, k);
  return c.c_dp * double_sum(c, levels, k, 1.0);
}

double product_bound(const BoundCoefficients& c, const std::vector<int>& levels, int k) {
  check_common(c, levels, k);
  const double d = static_cast<double>(c.d);
  const double inner_weight = std::pow(d, 0.5 * c.p - 1.0);
  const double prefactor =
      c.c_p.value_or(c.c_dp) * std::pow(d, (c.p - 2.0) / (2.0 * c.p));
  return prefactor * double_sum(c, levels, k, inner_weight);
}

double step_bound(double C0, double C1, double C2, double T, int n, double x0_norm_p,
                  double c_dp, double p, int d, const std::vector<int>& levels, int k) {
  if (!(p > 2.0 && p <= 3.0)) throw std::invalid_argument("step_bound: p in (2,3]");
  if (d < 1) throw std::invalid_argument("step_bound: d must be >= 1");
  if (n < 1 || !(T > 0.0)) throw std::invalid_argument("step_bound: need n >= 1, T > 0");
  if (k < 0 || k > n) throw std::invalid_argument("step_bound: step out of range");
  if (!(c_dp > 0.0)) throw std::invalid_argument("step_bound: rate constant > 0");
  if (x0_norm_p < 0.0) throw std::invalid_argument("step_bound: x0 norm >= 0");
  if (levels.size() < static_cast<std::size_t>(k) + 1) {
    throw std::invalid_argument("step_bound: levels shorter than step index");
  }

  const double h = T / static_cast<double>(n);
  const double tk = static_cast<double>(k) * h;
  const double growth =
      (C2 == 0.0) ? C1 * tk
                  : (C1 / C2) * std::exp(C2 * h) * (std::exp(C2 * tk) - 1.0);
  const double bracket = std::exp(C1 * T) * x0_norm_p + growth;
  const double root = std::pow(bracket, 1.0 / p);
  const double inv_d = 1.0 / static_cast<double>(d);

  double total = 0.0;
  for (int i = 0; i <= k; ++i) {
    if (levels[static_cast<std::size_t>(i)] < 1) {
      throw std::invalid_argument("step_bound: levels must be >= 1");
    }
    const double ti = static_cast<double>(i) * h;
    total += std::exp(C0 * (tk - ti)) * root *
             std::pow(static_cast<double>(levels[static_cast<std::size_t>(i)]), -inv_d);
  }
  return c_dp * total;
}

double weak_error_bound(const WeakErrorParams& w, int k) {
  if (k < 0) throw std::invalid_argument("weak_error_bound: step index >= 0");
  if (w.sq_errors.size() < static_cast<std::size_t>(k) + 1) {
    throw std::invalid_argument("weak_error_bound: squared errors shorter than step");
  }
  if (w.grad_f_lip < 0.0 || w.f_lip < 0.0 || w.C < 0.0 || w.Cprime < 0.0 || w.h < 0.0) {
    throw std::invalid_argument("weak_error_bound: parameters must be nonnegative");
  }
  const double tk = static_cast<double>(k) * w.h;
  double total = 0.0;
  for (int l = 0; l <= k; ++l) {
    if (w.sq_errors[static_cast<std::size_t>(l)] < 0.0) {
      throw std::invalid_argument("weak_error_bound: squared errors must be >= 0");
    }
    const double coeff = w.grad_f_lip * std::exp(w.C * static_cast<double>(k - l) * w.h) +
                         w.Cprime * w.f_lip * tk;
    total += coeff * w.sq_errors[static_cast<std::size_t>(l)];
  }
  return 0.5 * total;
}

PropagationConstants propagation_constants(PropagationKind kind,
                                           const PropagationInputs& in) {
  auto nonneg = [](double v, const char* what) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string("propagation_constants: ") + what);
    }
  };
  nonneg(in.b1_sup, "||b'|| must be >= 0");
  nonneg(in.b2_sup, "||b''|| must be >= 0");
  nonneg(in.s1_sup, "||sigma'|| must be >= 0");
  nonneg(in.ssig2_sup, "||sigma sigma''|| must be >= 0");
  nonneg(in.g1_sup, "||gamma'|| must be >= 0");
  nonneg(in.g2_sup, "||gamma''|| must be >= 0");
  nonneg(in.gg2_sup, "||gamma gamma''|| must be >= 0");
  nonneg(in.jump_second, "E[U^2] must be >= 0");
  nonneg(in.lambda, "lambda must be >= 0");
  nonneg(in.T, "T must be >= 0");
  if (!std::isfinite(in.jump_mean)) {
    throw std::invalid_argument("propagation_constants: E[U] must be finite");
  }

  PropagationConstants out;
  const double euler_c =
      std::max(in.b1_sup + 0.5 * in.s1_sup * in.s1_sup,
               2.0 * in.b1_sup + in.s1_sup * in.s1_sup + in.ssig2_sup +
                   in.T * in.b1_sup * in.b1_sup);

  switch (kind) {
    case PropagationKind::Euler:
      out.C = euler_c;
      out.Cprime = in.b2_sup;
      return out;
    case PropagationKind::Milstein: {
      // Driftless case: constants built from sigma terms only.
      const double s1 = in.s1_sup, s2 = in.ssig2_sup;
      out.C = s1 * s1 + 0.5 * in.T * (s1 * s1 + s2) * (s1 * s1 + s2) +
              s2 * (1.0 + std::sqrt(in.T) * s1) + 0.5 * s1 * s2;
      out.Cprime = 0.0;
      return out;
    }
    case PropagationKind::JumpEuler: {
      const double a = in.lambda * std::abs(in.jump_mean) * in.g1_sup;
      const double ubar2 =
          std::sqrt(in.jump_second) + in.lambda * in.T * std::abs(in.jump_mean);
      out.C = euler_c + 2.0 * a + in.T * a * a +
              in.lambda * ubar2 * ubar2 * (in.gg2_sup + in.g1_sup * in.g1_sup);
      out.Cprime = in.b2_sup + in.lambda * in.g2_sup;
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

double calibrate_rate_constant(const std::vector<int>& levels,
                               const std::vector<double>& errors) {
  if (levels.empty() || levels.size() != errors.size()) {
    throw std::invalid_argument("calibrate_rate_constant: size mismatch");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 1) throw std::invalid_argument("calibrate_rate_constant: N >= 1");
    if (errors[i] < 0.0) {
      throw std::invalid_argument("calibrate_rate_constant: errors must be >= 0");
    }
    const double invN = 1.0 / static_cast<double>(levels[i]);
    num += errors[i] * invN;
    den += invN * invN;
  }
  return num / den;
}

}  // namespace recq
