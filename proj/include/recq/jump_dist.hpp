#pragma once

#include <vector>

#include "recq/quantizer1d.hpp"
#include "recq/rng.hpp"
#include "recq/scalar_laws.hpp"

namespace recq {

// Law of a single jump mark U.
enum class JumpSizeKind {
  Gaussian,        // U ~ N(mean_jump, theta^2)
  LognormalShift,  // U = exp(xi) - 1, xi ~ N(0, theta^2)
  Empirical,       // finite atom/weight list
  Custom,          // arbitrary scalar law
};

struct JumpSizeLaw {
  JumpSizeKind kind = JumpSizeKind::Gaussian;
  double mean_jump = 0.0;  // Gaussian location
  double theta = 0.0;      // Gaussian / lognormal scale
  std::vector<double> atoms;
  std::vector<double> weights;
  ScalarLaw custom;

  static JumpSizeLaw gaussian(double mean_jump, double theta);
  static JumpSizeLaw lognormal_shift(double theta);
  static JumpSizeLaw empirical(std::vector<double> atoms, std::vector<double> weights);
  static JumpSizeLaw custom_law(ScalarLaw law);

  double mean() const;           // E[U]
  double second_moment() const;  // E[U^2]
};

// Batch-evaluation view of the mark law (used to quantize it).
LawView jump_law_view(const JumpSizeLaw& law);

// Optimal N-point quantization of the mark law, returned as an empirical law.
JumpSizeLaw quantize_jump_law(const JumpSizeLaw& law, int n_points,
                              const NewtonOptions& options = {});

enum class JumpCountMode {
  ShortTime,  // Bernoulli {0,1} with P(1) = lambda*h; requires lambda*h < 1
  Truncated,  // Poisson truncated at m_max, tail mass folded into the last entry
};

// Weights of the per-step jump-count distribution, indexed by count m.
std::vector<double> jump_count_weights(double lambda, double h, JumpCountMode mode,
                                       int m_max);

// Exact draw from the mark law.
double sample_jump_size(const JumpSizeLaw& law, RngStream& rng);

// Exact draw from a scalar law (mixtures, affine chi^2, atoms).
double sample_scalar_law(const ScalarLaw& law, RngStream& rng);

}  // namespace recq
