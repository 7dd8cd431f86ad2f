#pragma once

#include <optional>
#include <vector>

namespace recq {

// Per-step coefficients feeding the a priori quadratic quantization-error
// bounds. alpha[0] is ||X_0||_p^p by convention; alpha[k], beta[k], lip[k]
// (k >= 1) are the one-step moment-growth and Lipschitz coefficients.
struct BoundCoefficients {
  double p = 3.0;            // moment order, in (2, 3]
  int d = 1;                 // state dimension
  double c_dp = 1.0;         // distortion-rate constant (not numerically pinned)
  std::optional<double> c_p; // product-bound prefactor; defaults to c_dp
  std::vector<double> alpha; // size n+1, alpha[0] = ||X_0||_p^p
  std::vector<double> beta;  // size n+1, beta[0] unused
  std::vector<double> lip;   // size n+1, lip[0] unused: [F_k]_Lip
};

// sum_{i=0..k} [F_{i+1:k}] * (sum_{l=0..i} alpha_l beta_{l:i})^{1/p} N_i^{-1/d}
// times c_dp, with [F_{k+1:k}] = 1 and empty products equal to 1.
double regular_bound(const BoundCoefficients& c, const std::vector<int>& levels, int k);

// Same double sum with the inner d^{(p/2-1)(i-l)} weighting and prefactor
// c_p * d^{(p-2)/(2p)}; coincides with regular_bound at d = 1 when c_p is
// left at its default.
double product_bound(const BoundCoefficients& c, const std::vector<int>& levels, int k);

// Bound under the one-step moment growth assumption with constants C0..C2:
// c_dp * sum_{i=0..k} e^{C0 (t_k - t_i)} * bracket^{1/p} * N_i^{-1/d} where
// bracket = e^{C1 T} x0_norm_p + (C1/C2) e^{C2 T/n} (e^{C2 t_k} - 1); the
// C2 = 0 case uses the limit C1 * t_k of the second term.
double step_bound(double C0, double C1, double C2, double T, int n, double x0_norm_p,
                  double c_dp, double p, int d, const std::vector<int>& levels, int k);

// Weak-error bound: (1/2) sum_{l=0..k} ([grad_f]_Lip e^{C (k-l) h}
// + Cprime [f]_Lip t_k) * sq_err[l].
struct WeakErrorParams {
  double grad_f_lip = 0.0;
  double f_lip = 0.0;
  double C = 0.0;
  double Cprime = 0.0;
  double h = 0.0;
  std::vector<double> sq_errors;  // ||X_hat_l - X_tilde_l||_2^2, l = 0..n
};

double weak_error_bound(const WeakErrorParams& w, int k);

// Transition-operator gradient-propagation constants (C, C') per scheme kind,
// assembled from caller-supplied coefficient sup-norms.
struct PropagationInputs {
  double b1_sup = 0.0;     // ||b'||
  double b2_sup = 0.0;     // ||b''||
  double s1_sup = 0.0;     // ||sigma'||
  double ssig2_sup = 0.0;  // ||sigma sigma''||
  double g1_sup = 0.0;     // ||gamma'||
  double g2_sup = 0.0;     // ||gamma''||
  double gg2_sup = 0.0;    // ||gamma gamma''||
  double jump_mean = 0.0;  // E[U_1]
  double jump_second = 0.0;  // E[U_1^2]
  double lambda = 0.0;
  double T = 0.0;
};

enum class PropagationKind { Euler, Milstein, JumpEuler };

struct PropagationConstants {
  double C = 0.0;
  double Cprime = 0.0;
};

PropagationConstants propagation_constants(PropagationKind kind,
                                           const PropagationInputs& in);

// Fits the distortion-rate constant from observed optimal quantization errors
// e_N at levels N (1-D): least-squares of e_N against N^{-1}.
double calibrate_rate_constant(const std::vector<int>& levels,
                               const std::vector<double>& errors);

}  // namespace recq
