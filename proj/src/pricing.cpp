#include "recq/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "recq/special_functions.hpp"

namespace recq {

double bs_put(double x, double sigma, double r, double tau, double K, bool* degenerate) {
  if (!(K > 0.0) || !(x > 0.0)) {
    throw std::invalid_argument("bs_put: spot and strike must be positive");
  }
  if (!(sigma > 0.0) || !(tau > 0.0)) {
    if (degenerate) *degenerate = true;
    const double disc = (tau > 0.0) ? std::exp(-r * tau) : 1.0;
    return std::max(K * disc - x, 0.0);
  }
  if (degenerate) *degenerate = false;
  const double sqt = sigma * std::sqrt(tau);
  const double d1 = (std::log(x / K) + (r + 0.5 * sigma * sigma) * tau) / sqt;
  const double d2 = d1 - sqt;
  return -x * std_normal_cdf(-d1) + std::exp(-r * tau) * K * std_normal_cdf(-d2);
}

double merton_put_series(double x0, double sigma, double r, double T, double lambda,
                         double theta, double K, double tail_tol) {
  if (!(x0 > 0.0) || !(K > 0.0) || !(T > 0.0)) {
    throw std::invalid_argument("merton_put_series: x0, K, T must be positive");
  }
  if (lambda < 0.0 || theta < 0.0 || sigma < 0.0) {
    throw std::invalid_argument("merton_put_series: sigma, lambda, theta must be >= 0");
  }
  if (!(tail_tol > 0.0)) {
    throw std::invalid_argument("merton_put_series: tail_tol must be > 0");
  }

  const double lT = lambda * T;
  const double eu1 = std::expm1(0.5 * theta * theta);  // E[U_1]
  const double spot_base = x0 * std::exp(-lT * eu1);

  double price = 0.0;
  double weight = std::exp(-lT);  // e^{-lambda T} (lambda T)^k / k!
  for (int k = 0;; ++k) {
    if (weight >= tail_tol) {
      const double spot_k = spot_base * std::exp(0.5 * static_cast<double>(k) * theta * theta);
      const double vol_k =
          std::sqrt(sigma * sigma + static_cast<double>(k) * theta * theta / T);
      price += weight * bs_put(spot_k, vol_k, r, T, K);
    } else if (static_cast<double>(k) >= lT) {
      break;  // past the Poisson mode and below tolerance
    }
    weight *= lT / static_cast<double>(k + 1);
    if (k > 100000) break;  // defensive cap; unreachable for sane inputs
  }
  return price;
}

double merton_put_closed_form(const SchemeSpec& model, const PutSpec& put,
                              double tail_tol) {
  if (model.kind != SchemeKind::JumpEuler) {
    throw std::invalid_argument("merton_put_closed_form: model must be a jump scheme");
  }
  if (model.size_law.kind != JumpSizeKind::LognormalShift) {
    throw std::invalid_argument(
        "merton_put_closed_form: marks must be lognormal-shift distributed");
  }
  if (!(put.spot > 0.0)) {
    throw std::invalid_argument("merton_put_closed_form: spot must be positive");
  }
  const double sigma = model.diffusion(0.0, put.spot) / put.spot;
  return merton_put_series(put.spot, sigma, put.rate, put.maturity, model.intensity,
                           model.size_law.theta, put.strike, tail_tol);
}

double equivalent_bs_vol(double sigma, double lambda, double theta) {
  if (sigma < 0.0 || lambda < 0.0 || theta < 0.0) {
    throw std::invalid_argument("equivalent_bs_vol: inputs must be >= 0");
  }
  return std::sqrt(sigma * sigma + lambda * theta * theta);
}

double quantized_put(const QuantizedChain& chain, const PutSpec& put) {
  const double K = put.strike;
  return quantized_expectation(
      chain, [K](double x) { return std::max(K - x, 0.0); },
      std::exp(-put.rate * put.maturity));
}

double quantized_expectation(const QuantizedChain& chain,
                             const std::function<double(double)>& payoff,
                             double discount) {
  if (chain.grids.empty()) {
    throw std::invalid_argument("quantized_expectation: empty chain");
  }
  const auto& x = chain.grids.back().points;
  const auto& w = chain.marginal_weights.back();
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += w[i] * payoff(x[i]);
  return discount * sum;
}

}  // namespace recq
