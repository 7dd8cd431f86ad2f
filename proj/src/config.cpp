#include "recq/config.hpp"

#include <cmath>
#include <utility>

#include <json.hpp>

namespace recq {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

double get_num(const json& j, const char* key, bool required, double dflt = 0.0) {
  if (!j.contains(key)) {
    if (required) fail(std::string("missing field '") + key + "'");
    return dflt;
  }
  const auto& v = j.at(key);
  if (!v.is_number()) fail(std::string("field '") + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(std::string("field '") + key + "' must be finite");
  return x;
}

std::int64_t get_int(const json& j, const char* key, bool required, std::int64_t dflt) {
  if (!j.contains(key)) {
    if (required) fail(std::string("missing field '") + key + "'");
    return dflt;
  }
  const auto& v = j.at(key);
  if (!v.is_number_integer()) fail(std::string("field '") + key + "' must be an integer");
  return v.get<std::int64_t>();
}

// Coefficient c(x) = a0 + a1*x, given either as a bare number (constant) or
// {"form": "constant"|"affine", ...}.
struct CoeffDef {
  double a0 = 0.0;
  double a1 = 0.0;
};

CoeffDef parse_coeff(const json& j, const char* what) {
  CoeffDef c;
  if (j.is_number()) {
    c.a0 = j.get<double>();
    if (!std::isfinite(c.a0)) fail(std::string(what) + ": value must be finite");
    return c;
  }
  if (!j.is_object()) fail(std::string(what) + ": expected number or object");
  const std::string form = j.value("form", "");
  if (form == "constant") {
    c.a0 = get_num(j, "value", true);
  } else if (form == "affine") {
    c.a0 = get_num(j, "a0", false, 0.0);
    c.a1 = get_num(j, "a1", false, 0.0);
  } else {
    fail(std::string(what) + ": form must be 'constant' or 'affine'");
  }
  return c;
}

JumpSizeLaw parse_size_law(const json& j) {
  if (!j.is_object()) fail("size_law must be an object");
  const std::string kind = j.value("kind", "");
  try {
    if (kind == "gaussian") {
      return JumpSizeLaw::gaussian(get_num(j, "mean", false, 0.0),
                                   get_num(j, "theta", true));
    }
    if (kind == "lognormal_shift") {
      return JumpSizeLaw::lognormal_shift(get_num(j, "theta", true));
    }
    if (kind == "empirical") {
      if (!j.contains("atoms") || !j.contains("weights")) {
        fail("empirical size_law needs atoms and weights");
      }
      return JumpSizeLaw::empirical(j.at("atoms").get<std::vector<double>>(),
                                    j.at("weights").get<std::vector<double>>());
    }
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  } catch (const json::exception& e) {
    fail(std::string("size_law: ") + e.what());
  }
  fail("size_law.kind must be gaussian | lognormal_shift | empirical");
}

}  // namespace

ParsedConfig parse_config_json(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("top level must be an object");
  if (!doc.contains("model") || !doc.at("model").is_object()) {
    fail("missing 'model' object");
  }
  const json& model = doc.at("model");

  ParsedConfig cfg;
  SchemeSpec& s = cfg.scheme;

  const std::string kind = model.value("scheme", "");
  if (kind == "euler") {
    s.kind = SchemeKind::Euler;
  } else if (kind == "milstein") {
    s.kind = SchemeKind::Milstein;
  } else if (kind == "taylor20") {
    s.kind = SchemeKind::Taylor20;
  } else if (kind == "jump_euler") {
    s.kind = SchemeKind::JumpEuler;
  } else {
    fail("model.scheme must be euler | milstein | taylor20 | jump_euler");
  }

  s.x0 = get_num(model, "x0", true);
  s.T = get_num(model, "T", true);
  const std::int64_t n = get_int(model, "n", true, 0);
  if (n < 1 || n > 1000000) fail("model.n must be in [1, 1e6]");
  s.n = static_cast<int>(n);
  if (!(s.T > 0.0)) fail("model.T must be > 0");

  if (!model.contains("drift")) fail("missing model.drift");
  if (!model.contains("diffusion")) fail("missing model.diffusion");
  const CoeffDef b = parse_coeff(model.at("drift"), "drift");
  const CoeffDef sg = parse_coeff(model.at("diffusion"), "diffusion");
  s.drift = [b](double, double x) { return b.a0 + b.a1 * x; };
  s.diffusion = [sg](double, double x) { return sg.a0 + sg.a1 * x; };
  s.drift_d1 = [b](double) { return b.a1; };
  s.drift_d2 = [](double) { return 0.0; };
  s.diffusion_d1 = [sg](double) { return sg.a1; };
  s.diffusion_d2 = [](double) { return 0.0; };

  if (s.kind == SchemeKind::JumpEuler) {
    if (!model.contains("jump") || !model.at("jump").is_object()) {
      fail("jump_euler model needs a 'jump' object");
    }
    const json& jj = model.at("jump");
    const CoeffDef g = parse_coeff(jj.contains("coeff") ? jj.at("coeff") : json(1.0),
                                   "jump.coeff");
    s.jump_coeff = [g](double x) { return g.a0 + g.a1 * x; };
    s.intensity = get_num(jj, "intensity", true);
    if (s.intensity < 0.0) fail("jump.intensity must be >= 0");
    if (!jj.contains("size_law")) fail("jump_euler model needs jump.size_law");
    s.size_law = parse_size_law(jj.at("size_law"));
    const std::string mode = jj.value("mode", "short");
    if (mode == "short") {
      s.jump_mode = JumpCountMode::ShortTime;
    } else if (mode == "truncated") {
      s.jump_mode = JumpCountMode::Truncated;
    } else {
      fail("jump.mode must be 'short' or 'truncated'");
    }
    const std::int64_t m_max = get_int(jj, "m_max", false, 1);
    if (m_max < 1 || m_max > 64) fail("jump.m_max must be in [1, 64]");
    s.m_max = static_cast<int>(m_max);
    const std::int64_t nu = get_int(jj, "nu_level", false, 50);
    if (nu < 1 || nu > 10000) fail("jump.nu_level must be in [1, 10000]");
    s.nu_level = static_cast<int>(nu);
    if (s.jump_mode == JumpCountMode::ShortTime && !(s.intensity * s.h() < 1.0)) {
      fail("short-time jump mode requires lambda*h < 1");
    }
  }

  // Levels: constant level (N_0 forced to 1) or explicit per-step list.
  if (!doc.contains("levels")) fail("missing 'levels'");
  const json& lv = doc.at("levels");
  if (lv.is_number_integer()) {
    const std::int64_t N = lv.get<std::int64_t>();
    if (N < 1 || N > 100000) fail("levels must be in [1, 1e5]");
    cfg.levels.assign(static_cast<std::size_t>(s.n) + 1, static_cast<int>(N));
    cfg.levels[0] = 1;
  } else if (lv.is_array()) {
    cfg.levels = lv.get<std::vector<int>>();
    if (cfg.levels.size() != static_cast<std::size_t>(s.n) + 1) {
      fail("levels list must have n+1 entries");
    }
    if (cfg.levels[0] != 1) fail("levels[0] must be 1");
    for (int N : cfg.levels) {
      if (N < 1 || N > 100000) fail("levels entries must be in [1, 1e5]");
    }
  } else {
    fail("'levels' must be an integer or a list");
  }

  if (doc.contains("quantizer")) {
    const json& q = doc.at("quantizer");
    if (!q.is_object()) fail("'quantizer' must be an object");
    cfg.quantizer.tol = get_num(q, "tol", false, cfg.quantizer.tol);
    if (!(cfg.quantizer.tol > 0.0)) fail("quantizer.tol must be > 0");
    const std::int64_t mn = get_int(q, "max_newton", false, cfg.quantizer.max_newton);
    const std::int64_t ml = get_int(q, "max_lloyd", false, cfg.quantizer.max_lloyd);
    if (mn < 0 || ml < 1) fail("quantizer iteration caps out of range");
    cfg.quantizer.max_newton = static_cast<int>(mn);
    cfg.quantizer.max_lloyd = static_cast<int>(ml);
  }

  if (doc.contains("put")) {
    const json& p = doc.at("put");
    if (!p.is_object()) fail("'put' must be an object");
    cfg.has_put = true;
    cfg.put.strike = get_num(p, "strike", true);
    cfg.put.rate = get_num(p, "rate", false, 0.0);
    cfg.put.maturity = get_num(p, "maturity", false, s.T);
    cfg.put.spot = get_num(p, "spot", false, s.x0);
    if (!(cfg.put.strike > 0.0)) fail("put.strike must be > 0");
    if (!(cfg.put.maturity > 0.0)) fail("put.maturity must be > 0");
    if (!(cfg.put.spot > 0.0)) fail("put.spot must be > 0");
  }

  if (doc.contains("mc")) {
    const json& m = doc.at("mc");
    if (!m.is_object()) fail("'mc' must be an object");
    const std::int64_t paths = get_int(m, "paths", false, cfg.mc_paths);
    if (paths < 1 || paths > 1000000000) fail("mc.paths must be in [1, 1e9]");
    cfg.mc_paths = paths;
    const std::int64_t seed = get_int(m, "seed", false, 0);
    cfg.mc_seed = static_cast<std::uint64_t>(seed);
  }

  cfg.x0_norm_p = std::abs(s.x0);
  if (doc.contains("bounds")) {
    const json& bd = doc.at("bounds");
    if (!bd.is_object()) fail("'bounds' must be an object");
    cfg.bounds_p = get_num(bd, "p", false, 3.0);
    if (!(cfg.bounds_p > 2.0 && cfg.bounds_p <= 3.0)) fail("bounds.p must be in (2,3]");
    const std::int64_t d = get_int(bd, "d", false, 1);
    if (d < 1 || d > 64) fail("bounds.d must be in [1, 64]");
    cfg.bounds_d = static_cast<int>(d);
    cfg.bounds_c_dp = get_num(bd, "c_dp", false, 1.0);
    if (!(cfg.bounds_c_dp > 0.0)) fail("bounds.c_dp must be > 0");
    cfg.bounds_c_p = get_num(bd, "c_p", false, -1.0);
    cfg.lin_growth = get_num(bd, "lin_growth", false, 0.0);
    cfg.upsilon = get_num(bd, "upsilon", false, 0.0);
    cfg.innovation_abs_p = get_num(bd, "innovation_abs_p", false, 0.0);
    cfg.x0_norm_p = get_num(bd, "x0_norm_p", false, std::abs(s.x0));
    if (cfg.lin_growth < 0.0 || cfg.upsilon < 0.0 || cfg.innovation_abs_p < 0.0 ||
        cfg.x0_norm_p < 0.0) {
      fail("bounds constants must be >= 0");
    }
    if (bd.contains("lipschitz")) {
      const json& lp = bd.at("lipschitz");
      if (!lp.is_object()) fail("bounds.lipschitz must be an object");
      cfg.lipschitz.b_lip = get_num(lp, "b", false, 0.0);
      cfg.lipschitz.sigma_lip = get_num(lp, "sigma", false, 0.0);
      cfg.lipschitz.sigsig_lip = get_num(lp, "sigsig", false, 0.0);
      cfg.lipschitz.btilde_lip = get_num(lp, "btilde", false, 0.0);
      cfg.lipschitz.sigtilde_lip = get_num(lp, "sigtilde", false, 0.0);
      cfg.lipschitz.gamma_lip = get_num(lp, "gamma", false, 0.0);
    }
    if (bd.contains("step")) {
      const json& st = bd.at("step");
      if (!st.is_object()) fail("bounds.step must be an object");
      cfg.has_step_constants = true;
      cfg.step_C0 = get_num(st, "C0", false, 0.0);
      cfg.step_C1 = get_num(st, "C1", false, 0.0);
      cfg.step_C2 = get_num(st, "C2", false, 0.0);
    }
    if (bd.contains("weak")) {
      const json& wk = bd.at("weak");
      if (!wk.is_object()) fail("bounds.weak must be an object");
      cfg.has_weak = true;
      cfg.weak_grad_f_lip = get_num(wk, "grad_f_lip", false, 0.0);
      cfg.weak_f_lip = get_num(wk, "f_lip", false, 0.0);
      cfg.weak_C = get_num(wk, "C", false, 0.0);
      cfg.weak_Cprime = get_num(wk, "Cprime", false, 0.0);
      if (cfg.weak_grad_f_lip < 0.0 || cfg.weak_f_lip < 0.0 || cfg.weak_C < 0.0 ||
          cfg.weak_Cprime < 0.0) {
        fail("bounds.weak constants must be >= 0");
      }
    }
  }

  // Surface coefficient/callable inconsistencies now rather than at run time.
  try {
    prepare_scheme(s);
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  return cfg;
}

}  // namespace recq
