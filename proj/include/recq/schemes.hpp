#pragma once

#include <functional>
#include <vector>

#include "recq/jump_dist.hpp"
#include "recq/rng.hpp"
#include "recq/scalar_laws.hpp"

namespace recq {

enum class SchemeKind { Euler, Milstein, Taylor20, JumpEuler };

// One-step discrete-time dynamics X_{k+1} = F(X_k, innovations) of a scalar
// diffusion dX = b dt + sigma dW (+ gamma(X-) dJ for JumpEuler). Coefficients
// take (t, x); the x-derivatives (needed by Milstein/Taylor 2.0) take x only,
// so those schemes assume time-homogeneous coefficients.
struct SchemeSpec {
  SchemeKind kind = SchemeKind::Euler;
  double x0 = 0.0;
  double T = 1.0;
  int n = 1;  // number of steps; h = T/n

  std::function<double(double, double)> drift;      // b(t, x)
  std::function<double(double, double)> diffusion;  // sigma(t, x)

  std::function<double(double)> drift_d1;      // b'
  std::function<double(double)> drift_d2;      // b''
  std::function<double(double)> diffusion_d1;  // sigma'
  std::function<double(double)> diffusion_d2;  // sigma''

  // JumpEuler only.
  std::function<double(double)> jump_coeff;  // gamma(x)
  double intensity = 0.0;                    // lambda
  JumpSizeLaw size_law;
  JumpCountMode jump_mode = JumpCountMode::ShortTime;
  int m_max = 1;       // truncation level in Truncated mode
  int nu_level = 50;   // quantization level for non-Gaussian mark laws

  double h() const { return T / static_cast<double>(n); }
};

// Scheme with all per-run precomputation done: validated spec, step size,
// jump-count weights, the (possibly quantized) mark atoms, and the exact
// compensator mean E[U_1].
struct PreparedScheme {
  SchemeSpec spec;
  double h = 0.0;
  std::vector<double> count_weights;  // P(count = m), m = 0..m_max
  std::vector<double> mark_atoms;     // per-mark values entering the mixture
  std::vector<double> mark_weights;
  double mark_mean = 0.0;  // exact E[U_1], used in the compensator
  bool gaussian_marks = false;
  double mark_loc = 0.0, mark_scale = 0.0;  // Gaussian mark parameters
};

PreparedScheme prepare_scheme(const SchemeSpec& spec);

// Law of X_{k+1} given X_k = x (grid time t_k = k*h).
ScalarLaw step_law(const PreparedScheme& s, int k, double x);

// One exact draw of X_{k+1} given X_k = x.
double simulate_step(const PreparedScheme& s, int k, double x, RngStream& rng);

// L^p growth/contraction coefficients of one scheme step, for p in (2, 3]:
// kappa_p = (p-1)(p-2)/2 + 2 p L, K_p = 2^{p-1} Upsilon^p (1 + p + h^{p/2-1}) E|Z|^p,
// alpha = (e^{kappa h} L + K) h, beta = 1 + (kappa e^{kappa h} + K) h.
struct CoefficientInputs {
  double lin_growth = 0.0;      // L: |b| + |sigma| <= L(1 + |x|) style constant
  double upsilon = 0.0;         // Upsilon: scale of the innovation part
  double innovation_abs_p = 0;  // E|Z|^p of the driving innovation
  double p = 3.0;
};

struct KeyLemmaCoeffs {
  double kappa_p = 0.0;
  double K_p = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

KeyLemmaCoeffs key_lemma_coeffs(const CoefficientInputs& in, double h);

// Lipschitz constant (in x, uniform over one step) of the conditional-mean map
// of one scheme step, assembled from coefficient Lipschitz constants.
struct LipschitzInputs {
  double b_lip = 0.0;         // [b]
  double sigma_lip = 0.0;     // [sigma]
  double sigsig_lip = 0.0;    // [sigma sigma']
  double btilde_lip = 0.0;    // [b b' + sigma^2 b''/2]
  double sigtilde_lip = 0.0;  // [(b sigma)' + sigma^2 sigma''/2]
  double gamma_lip = 0.0;     // [gamma]
};

double scheme_lipschitz(const SchemeSpec& spec, const LipschitzInputs& lip);

}  // namespace recq
