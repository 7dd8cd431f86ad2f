#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "recq/pricing.hpp"
#include "recq/quantizer1d.hpp"
#include "recq/schemes.hpp"

namespace recq {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A fully resolved job description: validated scheme, per-step levels,
// quantizer options, and optional pricing/MC parameters.
struct ParsedConfig {
  SchemeSpec scheme;
  std::vector<int> levels;  // size n+1, levels[0] == 1
  NewtonOptions quantizer;

  bool has_put = false;
  PutSpec put;

  std::int64_t mc_paths = 1000000;
  std::uint64_t mc_seed = 0;

  // Bound-evaluation constants (model knowledge, not derivable from callables).
  double bounds_p = 3.0;
  int bounds_d = 1;
  double bounds_c_dp = 1.0;
  double bounds_c_p = -1.0;  // <= 0: use c_dp
  double lin_growth = 0.0;
  double upsilon = 0.0;
  double innovation_abs_p = 0.0;
  double x0_norm_p = 0.0;
  LipschitzInputs lipschitz;
  bool has_step_constants = false;
  double step_C0 = 0.0, step_C1 = 0.0, step_C2 = 0.0;
  bool has_weak = false;
  double weak_grad_f_lip = 0.0, weak_f_lip = 0.0, weak_C = 0.0, weak_Cprime = 0.0;
};

// Parses and validates the JSON job document; throws ConfigError with a
// human-readable message on any schema or invariant violation (including
// lambda*h >= 1 in short-time jump mode).
ParsedConfig parse_config_json(const std::string& json_text);

}  // namespace recq
