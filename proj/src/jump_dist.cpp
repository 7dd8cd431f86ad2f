#include "recq/jump_dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>

#include "recq/special_functions.hpp"

namespace recq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTailZ = 12.0;

void check_weights(const std::vector<double>& atoms, const std::vector<double>& weights) {
  if (atoms.empty() || atoms.size() != weights.size()) {
    throw std::invalid_argument("empirical jump law: atoms/weights size mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!std::isfinite(atoms[i])) {
      throw std::invalid_argument("empirical jump law: atom not finite");
    }
    if (!(weights[i] >= 0.0)) {
      throw std::invalid_argument("empirical jump law: negative weight");
    }
    sum += weights[i];
  }
  if (std::abs(sum - 1.0) > 1e-10) {
    throw std::invalid_argument("empirical jump law: weights must sum to 1");
  }
}

}  // namespace

JumpSizeLaw JumpSizeLaw::gaussian(double mean_jump, double theta) {
  if (!std::isfinite(mean_jump) || !(theta >= 0.0) || !std::isfinite(theta)) {
    throw std::invalid_argument("gaussian jump law: bad parameters");
  }
  JumpSizeLaw law;
  law.kind = JumpSizeKind::Gaussian;
  law.mean_jump = mean_jump;
  law.theta = theta;
  return law;
}

JumpSizeLaw JumpSizeLaw::lognormal_shift(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw std::invalid_argument("lognormal jump law: theta must be positive");
  }
  JumpSizeLaw law;
  law.kind = JumpSizeKind::LognormalShift;
  law.theta = theta;
  return law;
}

JumpSizeLaw JumpSizeLaw::empirical(std::vector<double> atoms, std::vector<double> weights) {
  check_weights(atoms, weights);
  JumpSizeLaw law;
  law.kind = JumpSizeKind::Empirical;
  law.atoms = std::move(atoms);
  law.weights = std::move(weights);
  return law;
}

JumpSizeLaw JumpSizeLaw::custom_law(ScalarLaw custom) {
  JumpSizeLaw law;
  law.kind = JumpSizeKind::Custom;
  law.custom = std::move(custom);
  return law;
}

double JumpSizeLaw::mean() const {
  switch (kind) {
    case JumpSizeKind::Gaussian:
      return mean_jump;
    case JumpSizeKind::LognormalShift:
      return std::expm1(0.5 * theta * theta);
    case JumpSizeKind::Empirical: {
      double m = 0.0;
      for (std::size_t i = 0; i < atoms.size(); ++i) m += weights[i] * atoms[i];
      return m;
    }
    case JumpSizeKind::Custom:
      return law_mean(custom);
  }
  throw std::logic_error("unreachable");
}

double JumpSizeLaw::second_moment() const {
  switch (kind) {
    case JumpSizeKind::Gaussian:
      return mean_jump * mean_jump + theta * theta;
    case JumpSizeKind::LognormalShift: {
      // E[(e^xi - 1)^2] = e^{2 theta^2} - 2 e^{theta^2/2} + 1.
      const double t2 = theta * theta;
      return std::exp(2.0 * t2) - 2.0 * std::exp(0.5 * t2) + 1.0;
    }
    case JumpSizeKind::Empirical: {
      double m = 0.0;
      for (std::size_t i = 0; i < atoms.size(); ++i) m += weights[i] * atoms[i] * atoms[i];
      return m;
    }
    case JumpSizeKind::Custom:
      return law_second_moment(custom);
  }
  throw std::logic_error("unreachable");
}

LawView jump_law_view(const JumpSizeLaw& law) {
  switch (law.kind) {
    case JumpSizeKind::Gaussian:
      return law_view(ScalarLaw::gaussian(law.mean_jump, law.theta));
    case JumpSizeKind::Empirical: {
      std::vector<GaussianComponent> comps(law.atoms.size());
      for (std::size_t i = 0; i < law.atoms.size(); ++i) {
        comps[i] = {law.weights[i], law.atoms[i], 0.0};
      }
      return law_view(ScalarLaw::mixture(std::move(comps)));
    }
    case JumpSizeKind::Custom:
      return law_view(law.custom);
    case JumpSizeKind::LognormalShift:
      break;
  }

  // U = e^xi - 1 with xi ~ N(0, theta^2): all cumulative quantities reduce to
  // the standard normal cdf at t = ln(1+u)/theta shifted by multiples of theta.
  const double theta = law.theta;
  const double mean = std::expm1(0.5 * theta * theta);
  const double e_half = std::exp(0.5 * theta * theta);
  const double e_two = std::exp(2.0 * theta * theta);
  const double second = e_two - 2.0 * e_half + 1.0;

  LawView view;
  view.mean = mean;
  view.second_moment = second;
  view.lo = std::expm1(-kTailZ * theta);
  view.hi = std::expm1(kTailZ * theta);
  view.has_atoms = false;
  view.batch = [theta, mean, second, e_half, e_two](std::span<const double> pts, double* F,
                                                    double* M1, double* M2, double* f) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double u = pts[i];
      if (u == kInf) {
        F[i] = 1.0;
        M1[i] = mean;
        M2[i] = second;
        f[i] = 0.0;
        continue;
      }
      if (!(u > -1.0)) {
        F[i] = 0.0;
        M1[i] = 0.0;
        M2[i] = 0.0;
        f[i] = 0.0;
        continue;
      }
      const double t = std::log1p(u) / theta;
      const double p0 = std_normal_cdf(t);
      const double p1 = std_normal_cdf(t - theta);
      const double p2 = std_normal_cdf(t - 2.0 * theta);
      F[i] = p0;
      M1[i] = e_half * p1 - p0;
      M2[i] = e_two * p2 - 2.0 * e_half * p1 + p0;
      f[i] = std_normal_pdf(t) / ((1.0 + u) * theta);
    }
  };
  return view;
}

JumpSizeLaw quantize_jump_law(const JumpSizeLaw& law, int n_points,
                              const NewtonOptions& options) {
  if (n_points < 1) {
    throw std::invalid_argument("quantize_jump_law: n_points must be >= 1");
  }
  const LawView view = jump_law_view(law);
  const OptimizeResult res = newton_optimize(view, n_points, nullptr, options);
  std::vector<double> w = companion_weights(res.grid, view);
  for (double& wi : w) wi = std::max(wi, 0.0);
  JumpSizeLaw out;
  out.kind = JumpSizeKind::Empirical;
  out.atoms = res.grid.points;
  out.weights = std::move(w);
  return out;
}

std::vector<double> jump_count_weights(double lambda, double h, JumpCountMode mode,
                                       int m_max) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("jump_count_weights: lambda must be >= 0");
  }
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw std::invalid_argument("jump_count_weights: h must be > 0");
  }
  const double lh = lambda * h;
  if (mode == JumpCountMode::ShortTime) {
    if (!(lh < 1.0)) {
      throw std::invalid_argument(
          "jump_count_weights: short-time mode needs lambda*h < 1");
    }
    return {1.0 - lh, lh};
  }
  if (m_max < 1) {
    throw std::invalid_argument("jump_count_weights: m_max must be >= 1");
  }
  std::vector<double> w(static_cast<std::size_t>(m_max) + 1);
  double term = std::exp(-lh);
  double sum = 0.0;
  for (int m = 0; m < m_max; ++m) {
    w[static_cast<std::size_t>(m)] = term;
    sum += term;
    term *= lh / static_cast<double>(m + 1);
  }
  w[static_cast<std::size_t>(m_max)] = std::max(0.0, 1.0 - sum);
  return w;
}

double sample_scalar_law(const ScalarLaw& law, RngStream& rng) {
  switch (law.kind) {
    case LawKind::Dirac:
      return law.atom;
    case LawKind::ShiftedChi2Affine: {
      const double z = rng.normal() + law.c;
      return law.offset + law.scale * z * z;
    }
    case LawKind::GaussianMixture: {
      const auto& comps = law.components;
      double u = rng.uniform();
      std::size_t pick = comps.size() - 1;
      double acc = 0.0;
      for (std::size_t i = 0; i < comps.size(); ++i) {
        acc += comps[i].weight;
        if (u <= acc) {
          pick = i;
          break;
        }
      }
      const auto& comp = comps[pick];
      if (comp.sd == 0.0) return comp.mean;
      return comp.mean + comp.sd * rng.normal();
    }
  }
  throw std::logic_error("unreachable");
}

double sample_jump_size(const JumpSizeLaw& law, RngStream& rng) {
  switch (law.kind) {
    case JumpSizeKind::Gaussian:
      return law.mean_jump + law.theta * rng.normal();
    case JumpSizeKind::LognormalShift:
      return std::expm1(law.theta * rng.normal());
    case JumpSizeKind::Empirical: {
      double u = rng.uniform();
      double acc = 0.0;
      std::size_t pick = law.atoms.size() - 1;
      for (std::size_t i = 0; i < law.atoms.size(); ++i) {
        acc += law.weights[i];
        if (u <= acc) {
          pick = i;
          break;
        }
      }
      return law.atoms[pick];
    }
    case JumpSizeKind::Custom:
      return sample_scalar_law(law.custom, rng);
  }
  throw std::logic_error("unreachable");
}

}  // namespace recq
