#pragma once

#include <functional>

#include "recq/recursive_engine.hpp"
#include "recq/schemes.hpp"

namespace recq {

struct PutSpec {
  double strike = 0.0;
  double rate = 0.0;
  double maturity = 0.0;
  double spot = 0.0;
};

// Black-Scholes European put. Degenerate inputs (sigma <= 0 or tau <= 0)
// return the discounted intrinsic value max(K e^{-r tau} - x, 0) and set
// *degenerate when provided.
double bs_put(double x, double sigma, double r, double tau, double K,
              bool* degenerate = nullptr);

// Closed-form put in the lognormal-jump model: Poisson-weighted series of
// Black-Scholes prices with per-term spot x0 e^{k theta^2/2 - lambda T E[U1]}
// and vol sqrt(sigma^2 + k theta^2 / T); terms added until the Poisson weight
// drops below tail_tol past the mode.
double merton_put_series(double x0, double sigma, double r, double T, double lambda,
                         double theta, double K, double tail_tol = 1e-14);

// Same, reading the model parameters off a jump scheme with proportional
// coefficients and lognormal-shift marks.
double merton_put_closed_form(const SchemeSpec& model, const PutSpec& put,
                              double tail_tol = 1e-14);

// sqrt(sigma^2 + lambda theta^2): diffusion volatility matching the jump
// model's log-variance.
double equivalent_bs_vol(double sigma, double lambda, double theta);

// Discounted terminal-grid expectation of the put payoff.
double quantized_put(const QuantizedChain& chain, const PutSpec& put);

// discount * sum_i payoff(x_n^i) p_n^i over the terminal marginal.
double quantized_expectation(const QuantizedChain& chain,
                             const std::function<double(double)>& payoff,
                             double discount);

}  // namespace recq
