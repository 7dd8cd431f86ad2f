// Command-line front end: parses JSON job configs, runs quantization,
// pricing, bound-evaluation, and Monte-Carlo comparison jobs through the
// C API, and writes CSV/JSON artifacts.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "recq.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitIo = RECQ_ERR_IO;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string levels;
  std::string scheme;
  std::string jump_mode;
  int nu_level = -1;
  std::int64_t seed = -1;
  double tail_tol = 1e-14;
  bool timings = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON job config path")->required();
  cmd->add_option("--out", o.out_dir, "output directory (default: stdout only)");
  cmd->add_option("--seed", o.seed, "override mc.seed");
  cmd->add_option("--levels", o.levels,
                  "override levels: single N or comma-separated N_0..N_n");
  cmd->add_option("--scheme", o.scheme,
                  "override model.scheme (euler|milstein|taylor20|jump_euler)");
  cmd->add_option("--jump-mode", o.jump_mode,
                  "override jump mode: short | truncated:<m_max>");
  cmd->add_option("--nu-level", o.nu_level, "override jump.nu_level");
  cmd->add_option("--tail-tol", o.tail_tol, "closed-form series tail tolerance");
  cmd->add_flag("--timings", o.timings, "record wall-clock timings in the manifest");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void die(int code, const std::string& msg, int step = -1) {
  json err;
  err["error"] = msg;
  if (step >= 0) err["step"] = step;
  std::cerr << err.dump() << "\n";
  std::exit(code);
}

[[noreturn]] void die_api(int code) {
  die(code, recq_last_error(), recq_last_error_step());
}

json load_config(const CommonOpts& o) {
  std::ifstream in(o.config_path);
  if (!in) die(kExitIo, "cannot open config: " + o.config_path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    die(RECQ_ERR_CONFIG, std::string("invalid config JSON: ") + e.what());
  }
  if (!doc.is_object()) die(RECQ_ERR_CONFIG, "config top level must be an object");

  if (!o.scheme.empty()) doc["model"]["scheme"] = o.scheme;
  if (o.nu_level >= 0) doc["model"]["jump"]["nu_level"] = o.nu_level;
  if (!o.jump_mode.empty()) {
    const auto colon = o.jump_mode.find(':');
    const std::string mode = o.jump_mode.substr(0, colon);
    if (mode == "short") {
      doc["model"]["jump"]["mode"] = "short";
    } else if (mode == "truncated") {
      doc["model"]["jump"]["mode"] = "truncated";
      if (colon != std::string::npos) {
        try {
          doc["model"]["jump"]["m_max"] = std::stoi(o.jump_mode.substr(colon + 1));
        } catch (const std::exception&) {
          die(RECQ_ERR_CONFIG, "bad --jump-mode m_max: " + o.jump_mode);
        }
      }
    } else {
      die(RECQ_ERR_CONFIG, "--jump-mode must be short or truncated:<m>");
    }
  }
  if (!o.levels.empty()) {
    if (o.levels.find(',') == std::string::npos) {
      try {
        doc["levels"] = std::stoi(o.levels);
      } catch (const std::exception&) {
        die(RECQ_ERR_CONFIG, "bad --levels value: " + o.levels);
      }
    } else {
      std::vector<int> lv;
      std::stringstream ss(o.levels);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        try {
          lv.push_back(std::stoi(tok));
        } catch (const std::exception&) {
          die(RECQ_ERR_CONFIG, "bad --levels entry: " + tok);
        }
      }
      doc["levels"] = lv;
    }
  }
  if (o.seed >= 0) doc["mc"]["seed"] = o.seed;
  return doc;
}

struct SchemeHandle {
  recq_scheme* s = nullptr;
  ~SchemeHandle() { recq_scheme_free(s); }
};

struct ChainHandle {
  recq_chain* c = nullptr;
  ~ChainHandle() { recq_chain_free(c); }
};

void make_scheme(const json& doc, SchemeHandle& h) {
  const std::string text = doc.dump();
  if (int rc = recq_scheme_from_json(text.c_str(), &h.s)) die_api(rc);
}

void quantize(const SchemeHandle& s, ChainHandle& c) {
  if (int rc = recq_quantize(s.s, &c.c)) die_api(rc);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) die(kExitIo, "cannot create output directory: " + dir);
}

std::ofstream open_out_file(const std::string& dir, const std::string& name) {
  fs::path p = fs::path(dir) / name;
  std::ofstream out(p);
  if (!out) die(kExitIo, "cannot open for writing: " + p.string());
  return out;
}

// Emits to stdout and, when out_dir is set, to out_dir/name as well.
void emit(const CommonOpts& o, const std::string& name, const std::string& text) {
  std::cout << text;
  if (!o.out_dir.empty()) {
    ensure_dir(o.out_dir);
    auto f = open_out_file(o.out_dir, name);
    f << text;
    if (!f) die(kExitIo, "write failed: " + name);
  }
}

void write_manifest(const CommonOpts& o, const std::string& command, const json& doc,
                    double elapsed_ms) {
  if (o.out_dir.empty()) return;
  ensure_dir(o.out_dir);
  json manifest;
  manifest["command"] = command;
  manifest["library_version"] = recq_version();
  manifest["config"] = doc;
  manifest["tail_tol"] = o.tail_tol;
  if (o.timings) manifest["elapsed_ms"] = elapsed_ms;
  auto f = open_out_file(o.out_dir, "manifest.json");
  f << manifest.dump(2) << "\n";
  if (!f) die(kExitIo, "write failed: manifest.json");
}

std::string density_csv(const ChainHandle& chain, int k) {
  int level = 0;
  if (int rc = recq_chain_level(chain.c, k, &level)) die_api(rc);
  if (level < 3) die(RECQ_ERR_CONFIG, "density needs at least 3 grid points");
  std::vector<double> left(static_cast<std::size_t>(level) - 2);
  std::vector<double> right(left.size()), value(left.size());
  if (int rc = recq_chain_density(chain.c, k, left.data(), right.data(), value.data())) {
    die_api(rc);
  }
  std::string out = "left,right,value\n";
  for (std::size_t i = 0; i < left.size(); ++i) {
    out += fmt(left[i]) + "," + fmt(right[i]) + "," + fmt(value[i]) + "\n";
  }
  return out;
}

double now_ms() {
  const auto t = std::chrono::steady_clock::now().time_since_epoch();
  return std::chrono::duration<double, std::milli>(t).count();
}

// ---- commands ----

int cmd_quantize(const CommonOpts& o) {
  const json doc = load_config(o);
  const double t0 = now_ms();
  SchemeHandle scheme;
  make_scheme(doc, scheme);
  ChainHandle chain;
  quantize(scheme, chain);

  if (o.out_dir.empty()) die(RECQ_ERR_CONFIG, "quantize requires --out");
  ensure_dir(o.out_dir);
  const std::string bundle = (fs::path(o.out_dir) / "chain").string();
  if (int rc = recq_chain_save(chain.c, bundle.c_str())) die_api(rc);

  int n = 0;
  recq_chain_steps(chain.c, &n);
  int terminal_level = 0;
  recq_chain_level(chain.c, n, &terminal_level);
  if (terminal_level >= 3) {
    auto f = open_out_file(o.out_dir, "densities.csv");
    f << density_csv(chain, n);
    if (!f) die(kExitIo, "write failed: densities.csv");
  }
  write_manifest(o, "quantize", doc, now_ms() - t0);
  std::cout << "chain bundle written to " << bundle << "\n";
  return 0;
}

void jump_params(const json& doc, double* lambda, double* theta) {
  *lambda = 0.0;
  *theta = 0.0;
  if (doc.contains("model") && doc["model"].contains("jump")) {
    const json& j = doc["model"]["jump"];
    *lambda = j.value("intensity", 0.0);
    if (j.contains("size_law")) *theta = j["size_law"].value("theta", 0.0);
  }
}

int cmd_price(const CommonOpts& o) {
  const json doc = load_config(o);
  const double t0 = now_ms();
  SchemeHandle scheme;
  make_scheme(doc, scheme);
  double strike = 0, rate = 0, maturity = 0, spot = 0;
  if (int rc = recq_scheme_put(scheme.s, &strike, &rate, &maturity, &spot)) die_api(rc);

  double closed = 0.0;
  if (int rc = recq_closed_put(scheme.s, strike, rate, maturity, o.tail_tol, &closed)) {
    die_api(rc);
  }
  ChainHandle chain;
  quantize(scheme, chain);
  double quantized = 0.0;
  if (int rc = recq_quantized_put(chain.c, strike, rate, maturity, &quantized)) {
    die_api(rc);
  }
  double lambda = 0, theta = 0;
  jump_params(doc, &lambda, &theta);

  std::string csv = "K,lambda,theta,P0_closed,P0_quantized,abs_err\n";
  csv += fmt(strike) + "," + fmt(lambda) + "," + fmt(theta) + "," + fmt(closed) + "," +
         fmt(quantized) + "," + fmt(std::abs(closed - quantized)) + "\n";
  emit(o, "price.csv", csv);
  write_manifest(o, "price", doc, now_ms() - t0);
  return 0;
}

int cmd_table1(const CommonOpts& o) {
  const json doc = load_config(o);
  const double t0 = now_ms();
  double rate = 0, maturity = 0;
  {
    SchemeHandle probe;
    make_scheme(doc, probe);  // validate the base config up front
    double strike = 0;
    if (int rc = recq_scheme_put(probe.s, &strike, &rate, &maturity, nullptr)) {
      die_api(rc);
    }
  }

  const std::vector<double> lambdas{1.0, 3.0, 5.0};
  const std::vector<double> thetas{0.01, 0.04};
  const std::vector<double> strikes{90, 92, 94, 96, 98, 100};

  struct Cell {
    double closed = 0.0, quantized = 0.0;
  };
  // cells[(li * thetas + ti) * strikes + ki]
  std::vector<Cell> cells(lambdas.size() * thetas.size() * strikes.size());

  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    for (std::size_t ti = 0; ti < thetas.size(); ++ti) {
      json cfg = doc;
      cfg["model"]["jump"]["intensity"] = lambdas[li];
      cfg["model"]["jump"]["size_law"]["theta"] = thetas[ti];
      SchemeHandle scheme;
      make_scheme(cfg, scheme);
      ChainHandle chain;
      quantize(scheme, chain);
      for (std::size_t ki = 0; ki < strikes.size(); ++ki) {
        Cell& cell = cells[(li * thetas.size() + ti) * strikes.size() + ki];
        if (int rc = recq_closed_put(scheme.s, strikes[ki], rate, maturity, o.tail_tol,
                                     &cell.closed)) {
          die_api(rc);
        }
        if (int rc = recq_quantized_put(chain.c, strikes[ki], rate, maturity,
                                        &cell.quantized)) {
          die_api(rc);
        }
      }
    }
  }

  std::string csv = "K,lambda,theta,P0_closed,P0_quantized,abs_err\n";
  for (std::size_t ki = 0; ki < strikes.size(); ++ki) {
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
      for (std::size_t ti = 0; ti < thetas.size(); ++ti) {
        const Cell& cell = cells[(li * thetas.size() + ti) * strikes.size() + ki];
        csv += fmt(strikes[ki]) + "," + fmt(lambdas[li]) + "," + fmt(thetas[ti]) + "," +
               fmt(cell.closed) + "," + fmt(cell.quantized) + "," +
               fmt(std::abs(cell.closed - cell.quantized)) + "\n";
      }
    }
  }
  emit(o, "table1.csv", csv);
  write_manifest(o, "table1", doc, now_ms() - t0);
  return 0;
}

int cmd_density(const CommonOpts& o) {
  const json doc = load_config(o);
  const double t0 = now_ms();
  SchemeHandle scheme;
  make_scheme(doc, scheme);
  ChainHandle chain;
  quantize(scheme, chain);
  int n = 0;
  recq_chain_steps(chain.c, &n);
  emit(o, "density.csv", density_csv(chain, n));
  write_manifest(o, "density", doc, now_ms() - t0);
  return 0;
}

int cmd_bounds(const CommonOpts& o) {
  const json doc = load_config(o);
  const double t0 = now_ms();
  SchemeHandle scheme;
  make_scheme(doc, scheme);

  int n = 0;
  recq_scheme_steps(scheme.s, &n);
  double h = 0;
  recq_scheme_step_size(scheme.s, &h);
  std::vector<int> levels(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    recq_scheme_level(scheme.s, k, &levels[static_cast<std::size_t>(k)]);
  }

  double p = 3, c_dp = 1, c_p = -1, lin_growth = 0, upsilon = 0, abs_p = 0, x0n = 0;
  int d = 1;
  recq_scheme_bound_params(scheme.s, &p, &d, &c_dp, &c_p, &lin_growth, &upsilon,
                           &abs_p, &x0n);

  double kappa = 0, Kp = 0, alpha = 0, beta = 0;
  if (int rc = recq_key_lemma_coeffs(lin_growth, upsilon, abs_p, p, h, &kappa, &Kp,
                                     &alpha, &beta)) {
    die_api(rc);
  }
  double lip = 0;
  if (int rc = recq_scheme_lipschitz(scheme.s, &lip)) die_api(rc);

  std::vector<double> alphas(static_cast<std::size_t>(n) + 1, alpha);
  std::vector<double> betas(static_cast<std::size_t>(n) + 1, beta);
  std::vector<double> lips(static_cast<std::size_t>(n) + 1, lip);
  alphas[0] = std::pow(x0n, p);  // ||X_0||_p^p for a deterministic start
  betas[0] = 0.0;
  lips[0] = 0.0;

  const bool has_step = doc.contains("bounds") && doc["bounds"].contains("step");
  double C0 = 0, C1 = 0, C2 = 0;
  if (has_step) {
    C0 = doc["bounds"]["step"].value("C0", 0.0);
    C1 = doc["bounds"]["step"].value("C1", 0.0);
    C2 = doc["bounds"]["step"].value("C2", 0.0);
  }
  const bool has_weak = doc.contains("bounds") && doc["bounds"].contains("weak");
  std::vector<double> sq_errors;
  double weak_grad = 0, weak_f = 0, weak_C = 0, weak_Cp = 0;
  ChainHandle chain;
  if (has_weak) {
    weak_grad = doc["bounds"]["weak"].value("grad_f_lip", 0.0);
    weak_f = doc["bounds"]["weak"].value("f_lip", 0.0);
    weak_C = doc["bounds"]["weak"].value("C", 0.0);
    weak_Cp = doc["bounds"]["weak"].value("Cprime", 0.0);
    quantize(scheme, chain);
    sq_errors.assign(static_cast<std::size_t>(n) + 1, 0.0);
    for (int k = 1; k <= n; ++k) {
      double dist = 0;
      if (int rc = recq_chain_report(chain.c, k, nullptr, nullptr, nullptr, nullptr,
                                     &dist)) {
        die_api(rc);
      }
      sq_errors[static_cast<std::size_t>(k)] = dist;
    }
  }

  std::string csv = "k,t_k,regular,product";
  if (has_step) csv += ",step";
  if (has_weak) csv += ",weak";
  csv += "\n";
  const double T = h * n;
  for (int k = 0; k <= n; ++k) {
    double reg = 0, prod = 0;
    if (int rc = recq_regular_bound(p, d, c_dp, alphas.data(), betas.data(),
                                    lips.data(), n + 1, levels.data(), n + 1, k, &reg)) {
      die_api(rc);
    }
    if (int rc = recq_product_bound(p, d, c_dp, c_p, alphas.data(), betas.data(),
                                    lips.data(), n + 1, levels.data(), n + 1, k,
                                    &prod)) {
      die_api(rc);
    }
    csv += std::to_string(k) + "," + fmt(k * h) + "," + fmt(reg) + "," + fmt(prod);
    if (has_step) {
      double sb = 0;
      if (int rc = recq_step_bound(C0, C1, C2, T, n, x0n, c_dp, p, d, levels.data(),
                                   n + 1, k, &sb)) {
        die_api(rc);
      }
      csv += "," + fmt(sb);
    }
    if (has_weak) {
      double wb = 0;
      if (int rc = recq_weak_error_bound(weak_grad, weak_f, weak_C, weak_Cp, h,
                                         sq_errors.data(), n + 1, k, &wb)) {
        die_api(rc);
      }
      csv += "," + fmt(wb);
    }
    csv += "\n";
  }
  emit(o, "bounds.csv", csv);
  write_manifest(o, "bounds", doc, now_ms() - t0);
  return 0;
}

int cmd_compare_mc(const CommonOpts& o) {
  const json doc = load_config(o);
  const double t0 = now_ms();
  SchemeHandle scheme;
  make_scheme(doc, scheme);
  ChainHandle chain;
  quantize(scheme, chain);
  int n = 0;
  recq_chain_steps(chain.c, &n);

  double qmean = 0, qvar = 0;
  recq_chain_mean(chain.c, n, &qmean);
  recq_chain_variance(chain.c, n, &qvar);

  long long paths = 0;
  unsigned long long seed = 0;
  recq_scheme_mc(scheme.s, &paths, &seed);
  double mc_mean = 0, mc_mean_se = 0, mc_var = 0, mc_var_se = 0;
  if (int rc = recq_mc_moments(scheme.s, paths, seed, &mc_mean, &mc_mean_se, &mc_var,
                               &mc_var_se)) {
    die_api(rc);
  }

  auto row = [](const std::string& name, double q, double mc, double se) {
    const double diff = std::abs(q - mc);
    return name + "," + fmt(q) + "," + fmt(mc) + "," + fmt(se) + "," + fmt(diff) + "," +
           fmt(se > 0 ? diff / se : 0.0) + "\n";
  };
  std::string csv = "quantity,quantized,mc,mc_se,abs_diff,n_se\n";
  csv += row("terminal_mean", qmean, mc_mean, mc_mean_se);
  csv += row("terminal_variance", qvar, mc_var, mc_var_se);

  double strike = 0, rate = 0, maturity = 0;
  if (recq_scheme_put(scheme.s, &strike, &rate, &maturity, nullptr) == RECQ_OK) {
    double qput = 0, mput = 0, mput_se = 0;
    if (int rc = recq_quantized_put(chain.c, strike, rate, maturity, &qput)) die_api(rc);
    if (int rc = recq_mc_put(scheme.s, paths, seed, strike, rate, maturity, &mput,
                             &mput_se)) {
      die_api(rc);
    }
    csv += row("put_price", qput, mput, mput_se);
  }
  emit(o, "compare_mc.csv", csv);
  write_manifest(o, "compare-mc", doc, now_ms() - t0);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recursive marginal quantization of discrete-time Markov schemes"};
  app.require_subcommand(1);

  CommonOpts o_quantize, o_price, o_table1, o_density, o_bounds, o_compare;
  CLI::App* c_quantize =
      app.add_subcommand("quantize", "run the recursive quantization, save the chain");
  add_common(c_quantize, o_quantize);
  CLI::App* c_price = app.add_subcommand("price", "closed-form vs quantized put price");
  add_common(c_price, o_price);
  CLI::App* c_table1 =
      app.add_subcommand("table1", "strike/intensity/jump-vol pricing sweep");
  add_common(c_table1, o_table1);
  CLI::App* c_density = app.add_subcommand("density", "terminal density estimate CSV");
  add_common(c_density, o_density);
  CLI::App* c_bounds = app.add_subcommand("bounds", "per-step a priori error bounds");
  add_common(c_bounds, o_bounds);
  CLI::App* c_compare =
      app.add_subcommand("compare-mc", "quantized chain vs Monte-Carlo oracle");
  add_common(c_compare, o_compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << "\n";
    return RECQ_ERR_CONFIG;
  }

  try {
    if (c_quantize->parsed()) return cmd_quantize(o_quantize);
    if (c_price->parsed()) return cmd_price(o_price);
    if (c_table1->parsed()) return cmd_table1(o_table1);
    if (c_density->parsed()) return cmd_density(o_density);
    if (c_bounds->parsed()) return cmd_bounds(o_bounds);
    if (c_compare->parsed()) return cmd_compare_mc(o_compare);
  } catch (const std::exception& e) {
    die(RECQ_ERR_INTERNAL, e.what());
  }
  return RECQ_ERR_CONFIG;
}
