// ridge: command-line front end.
//
// Exit codes: 0 success, 2 invalid input, 3 solver did not converge,
// 4 certification failed. Errors go to stderr as one JSON object.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ridge/ridge.hpp"

namespace fs = std::filesystem;
using ridge::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitCertification = 4;

struct Common {
  std::optional<std::string> output;
  std::optional<std::size_t> workers;
  bool require_size_condition = false;
};

// --output, then the config, then RIDGE_OUTPUT_DIR.
std::optional<fs::path> output_dir(const Common& c, const std::optional<std::string>& from_config = {}) {
  if (c.output) return fs::path(*c.output);
  if (from_config) return fs::path(*from_config);
  if (const char* env = std::getenv("RIDGE_OUTPUT_DIR"); env && *env) return fs::path(env);
  return std::nullopt;
}

void emit(const json& j, const std::optional<fs::path>& dir, const std::string& file) {
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (dir) ridge::atomic_write(*dir / file, text);
}

json error_json(const std::string& kind, const std::string& message, const std::vector<std::string>& violations = {}) {
  json j{{"schema", "ridge.error"}, {"schema_version", ridge::kSchemaVersion}};
  j["error"] = {{"kind", kind}, {"message", message}, {"violations", violations}};
  return j;
}

int fail(int code, const json& err) {
  std::cerr << err.dump() << "\n";
  return code;
}

std::string plot_table(const std::vector<std::pair<double, double>>& rows) {
  std::string s;
  for (const auto& [x, y] : rows) s += ridge::format_double(x) + " " + ridge::format_double(y) + "\n";
  return s;
}

// ---------------------------------------------------------------------------

int cmd_minimize(const std::string& config_path, const Common& common) {
  const auto cfg = ridge::load_config(config_path, common.require_size_condition);
  const auto dir = output_dir(common, cfg.output_directory).value_or(fs::path("."));
  const auto g = cfg.grid();
  const auto b = cfg.boundary_data(g);
  const auto params = cfg.params(b);

  ridge::MinimizeResult res;
  std::optional<std::string> failure;
  try {
    res = ridge::continuation_minimize(b, params.epsilon, g, cfg.solve);
  } catch (const ridge::LineSearchError& e) {
    res = e.last_iterate();
    failure = e.what();
  }
  json out = ridge::to_json(res);
  out["config"] = ridge::to_json(cfg);
  out["params"] = ridge::to_json(params);
  out["grid"] = ridge::to_json(g);
  out["physical_energy"] = ridge::unscale_energy(res.breakdown.total_I, params);
  out["snapshot"] = "fields.json";
  ridge::write_snapshot(dir, "fields", ridge::Snapshot{res.fields, b, params});
  emit(out, dir, "minimize.json");
  if (failure) return fail(kExitNonConvergence, error_json("line_search", *failure));
  return res.converged ? kExitOk : kExitNonConvergence;
}

int cmd_certify(const std::string& snapshot, std::optional<double> tol_c, bool profiles, const Common& common) {
  const auto s = ridge::read_snapshot(snapshot);
  ridge::DiscreteTolerance tol;
  if (tol_c) tol.c = *tol_c;
  const auto cert = ridge::certify(s.fields, s.boundary, s.params, tol);
  emit(ridge::to_json(cert, profiles), output_dir(common), "certificate.json");
  return cert.pass ? kExitOk : kExitCertification;
}

int cmd_sweep(const std::string& config_path, const Common& common) {
  auto cfg = ridge::load_config(config_path, common.require_size_condition);
  if (common.workers) cfg.workers = *common.workers;
  const auto dir = output_dir(common, cfg.output_directory).value_or(fs::path("."));
  fs::create_directories(dir);

  // Completed points are appended to sweep.csv.partial as they finish, then
  // the finished table replaces sweep.csv in one rename.
  const fs::path partial = dir / "sweep.csv.partial";
  std::ofstream log(partial, std::ios::trunc);
  if (!log) throw ridge::IoError("cannot open " + partial.string());
  log << ridge::sweep_csv_header() << std::flush;
  const auto records = ridge::run_sweep(cfg.sweep_spec(), [&](const ridge::SweepRecord& r) {
    log << ridge::sweep_csv_row(r) << std::flush;
    std::cerr << "point " << r.index << ": epsilon=" << r.epsilon << " alpha=" << r.alpha << " I=" << r.I_min
              << " status=" << r.status << " certificate=" << (r.certificate_pass ? "pass" : "fail") << "\n";
  });
  log.close();

  std::string csv = ridge::sweep_csv_header();
  json jr = json::array();
  for (const auto& r : records) {
    csv += ridge::sweep_csv_row(r);
    jr.push_back(ridge::to_json(r));
  }
  ridge::atomic_write(dir / "sweep.csv", csv);
  fs::remove(partial);
  json out = ridge::dump_schema("ridge.sweep");
  out["config"] = ridge::to_json(cfg);
  out["records"] = jr;
  emit(out, dir, "sweep.json");

  bool converged = true, certified = true;
  for (const auto& r : records) {
    converged = converged && r.converged;
    certified = certified && r.certificate_pass;
  }
  if (!converged) return kExitNonConvergence;
  return certified ? kExitOk : kExitCertification;
}

int cmd_fit(const std::string& csv_path, const std::string& parameter, double min_span, const Common& common) {
  const auto records = ridge::parse_sweep_csv(ridge::read_file(csv_path));
  const auto fit = ridge::fit_exponent(records, parameter, min_span);
  const auto dir = output_dir(common).value_or(fs::path(csv_path).parent_path());
  std::vector<std::pair<double, double>> data, line;
  for (const auto& r : records) {
    if (!r.retained()) continue;
    const double x = parameter == "sigma" ? r.sigma : parameter == "epsilon" ? r.epsilon : r.alpha;
    data.emplace_back(x, r.physical_energy);
    line.emplace_back(x, std::exp(fit.intercept) * std::pow(x, fit.exponent));
  }
  ridge::atomic_write(dir / ("plot_" + parameter + "_data.dat"), plot_table(data));
  ridge::atomic_write(dir / ("plot_" + parameter + "_fit.dat"), plot_table(line));
  emit(ridge::to_json(fit), dir, "fit_" + parameter + ".json");
  return kExitOk;
}

int cmd_constants(bool search, const Common& common) {
  json out = ridge::dump_schema("ridge.constants");
  for (auto conv : {ridge::Convention::published, ridge::Convention::corrected}) {
    const auto r = ridge::optimal_constants(conv);
    json c = ridge::to_json(r);
    c["kappa_K_at_presented_mu_star"] = r.kappa_prefactor * ridge::kappa(r.mu_star_presented);
    c["lemma2_coefficient"] = ridge::kLemma2Coefficient;
    c["exact_root_satisfies_bound"] =
        r.kappa_prefactor * ridge::kappa(r.mu_star_exact) >= ridge::kLemma2Coefficient * (1.0 - 1e-12);
    if (search) {
      const auto s = ridge::search_deltas(199, 400, 4.0, ridge::kSizeConstantB, conv);
      c["delta_search"] = ridge::to_json(s.best);
      c["delta_search"]["evaluated"] = s.evaluated;
    }
    out[ridge::to_string(conv)] = c;
  }
  emit(out, output_dir(common), "constants.json");
  return kExitOk;
}

int cmd_crossover(double phi, double L, double a, const Common& common) {
  emit(ridge::to_json(ridge::crossover_thickness(phi, L, a)), output_dir(common), "crossover.json");
  return kExitOk;
}

struct BlisterArgs {
  double lambda = 1.0, sigma = 0.01, L = 1.0, c = 1.0, C = 1.0;
  std::optional<std::string> fit;
  double sigma_lo = 0.01, sigma_hi = 0.1;
  std::size_t n = 16;
};

int cmd_blister(const BlisterArgs& a, const Common& common) {
  const auto band = ridge::blister_band(a.lambda, a.sigma, a.L, a.c, a.C);
  json out = ridge::dump_schema("ridge.blister_band");
  out["lambda"] = a.lambda;
  out["sigma"] = a.sigma;
  out["L"] = a.L;
  out["c"] = a.c;
  out["C"] = a.C;
  out["lower"] = band.lower;
  out["upper"] = band.upper;
  const auto dir = output_dir(common);
  if (a.fit) {
    const json fj = ridge::read_json(*a.fit);
    ridge::ScalingFit f;
    f.parameter_name = fj.at("parameter");
    f.exponent = fj.at("exponent");
    f.intercept = fj.at("intercept");
    const auto rows = ridge::overlay_table(f, a.lambda, a.L, a.c, a.C, a.sigma_lo, a.sigma_hi, a.n);
    std::vector<std::pair<double, double>> ridge_rows, lo, hi;
    for (const auto& r : rows) {
      ridge_rows.emplace_back(r.sigma, r.ridge);
      lo.emplace_back(r.sigma, r.blister_lower);
      hi.emplace_back(r.sigma, r.blister_upper);
    }
    const auto d = dir.value_or(fs::path("."));
    ridge::atomic_write(d / "overlay_ridge.dat", plot_table(ridge_rows));
    ridge::atomic_write(d / "overlay_blister_lower.dat", plot_table(lo));
    ridge::atomic_write(d / "overlay_blister_upper.dat", plot_table(hi));
    out["overlay_rows"] = rows.size();
  }
  emit(out, dir, "blister_band.json");
  return kExitOk;
}

int cmd_selftest(const Common& common) {
  json out = ridge::dump_schema("ridge.selftest");
  bool ok = true;
  auto check = [&](const std::string& name, bool pass, json detail) {
    detail["pass"] = pass;
    out["checks"][name] = detail;
    ok = ok && pass;
  };

  const double k0 = ridge::kappa(0.0);
  check("kappa_at_zero", std::abs(k0 - 1.0 / 105.0) <= 1e-12, {{"value", k0}, {"expected", 1.0 / 105.0}});

  std::vector<double> mus(1000);
  for (std::size_t k = 0; k < mus.size(); ++k) mus[k] = 0.2 * static_cast<double>(k) / 999.0;
  const auto app = ridge::appendix_check(mus);
  check("appendix", app.pass, {{"min_margin", app.min_margin}, {"argmin_mu", app.argmin_mu}, {"samples", app.samples}});

  const double beyond = ridge::kappa(ridge::kCubicPeak) + ridge::kappa(0.2) + ridge::kappa(1.0);
  check("kappa_vanishes_past_peak", beyond == 0.0, {{"sum", beyond}});

  const auto pub = ridge::optimal_constants(ridge::Convention::published);
  check("constants",
        std::abs(pub.mu_star_presented - 0.048) < 1e-12 && std::abs(pub.b_presented - 0.13) < 1e-12 &&
            pub.kappa_prefactor * ridge::kappa(pub.mu_star_exact) >= ridge::kLemma2Coefficient * (1.0 - 1e-12),
        {{"mu_star", pub.mu_star_presented}, {"b", pub.b_presented}, {"mu_star_exact", pub.mu_star_exact}});

  double worst = 0.0;
  for (double alpha : {0.05, 0.1, 0.2, 0.4}) {
    const double m = ridge::theorem_objective(alpha, ridge::theorem_argmin(alpha));
    worst = std::max(worst, std::abs(m / ridge::theorem_bound(alpha) - 1.0));
  }
  check("theorem_arithmetic", worst <= 1e-10, {{"worst_relative_error", worst}});

  out["pass"] = ok;
  emit(out, output_dir(common), "selftest.json");
  return ok ? kExitOk : kExitCertification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimal-ridge energy minimizer and lower-bound certifier"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--output,-o", common.output, "Output directory (default: config, then RIDGE_OUTPUT_DIR)");
  app.add_option("--workers", common.workers, "Worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_flag("--require-size-condition", common.require_size_condition,
               "Reject configs whose boundary data violate the size condition");

  std::string config, snapshot, csv, parameter = "sigma";
  std::optional<double> tol_c;
  bool profiles = true, search = false;
  double min_span = 10.0, phi = 0.3, L = 1.0, a = 1e-3;
  BlisterArgs blister;

  auto* minimize = app.add_subcommand("minimize", "Minimize the energy for one configuration");
  minimize->add_option("config", config, "JSON config file")->required();
  auto* certify = app.add_subcommand("certify", "Certify a field snapshot");
  certify->add_option("snapshot", snapshot, "Snapshot sidecar (.json)")->required();
  certify->add_option("--tol-disc-constant", tol_c, "Constant c in tol_disc = c (h_x^2 + h_y^2)");
  certify->add_flag("!--no-profiles", profiles, "Omit the per-row and per-column profiles");
  auto* sweep = app.add_subcommand("sweep", "Run an (epsilon, alpha) sweep");
  sweep->add_option("config", config, "JSON config file")->required();
  auto* fit = app.add_subcommand("fit", "Fit a power law to sweep records");
  fit->add_option("csv", csv, "sweep.csv")->required();
  fit->add_option("--parameter", parameter, "sigma, epsilon or alpha")
      ->check(CLI::IsMember({"sigma", "epsilon", "alpha"}));
  fit->add_option("--min-span", min_span, "Smallest accepted max/min ratio of the parameter");
  auto* constants = app.add_subcommand("constants", "Report the constants of the lower bound");
  constants->add_flag("--search", search, "Also run the (delta1, delta2) grid search");
  auto* crossover = app.add_subcommand("crossover", "Ridge / vertex crossover thickness");
  crossover->add_option("--phi", phi)->required();
  crossover->add_option("--L", L);
  crossover->add_option("--a", a)->required();
  auto* band = app.add_subcommand("blister-band", "Blister energy band, optionally overlaid on a ridge fit");
  band->add_option("--lambda", blister.lambda);
  band->add_option("--sigma", blister.sigma);
  band->add_option("--L", blister.L);
  band->add_option("--c", blister.c);
  band->add_option("--C", blister.C);
  band->add_option("--fit", blister.fit, "fit JSON to overlay");
  band->add_option("--sigma-lo", blister.sigma_lo);
  band->add_option("--sigma-hi", blister.sigma_hi);
  band->add_option("--points", blister.n);
  auto* selftest = app.add_subcommand("selftest", "Quick K / appendix / constants checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kExitValidation, error_json("usage", e.what()));
  }

  try {
    if (*minimize) return cmd_minimize(config, common);
    if (*certify) return cmd_certify(snapshot, tol_c, profiles, common);
    if (*sweep) return cmd_sweep(config, common);
    if (*fit) return cmd_fit(csv, parameter, min_span, common);
    if (*constants) return cmd_constants(search, common);
    if (*crossover) return cmd_crossover(phi, L, a, common);
    if (*band) return cmd_blister(blister, common);
    if (*selftest) return cmd_selftest(common);
  } catch (const ridge::ValidationError& e) {
    return fail(kExitValidation, error_json(e.kind(), e.what(), e.violations()));
  } catch (const ridge::LineSearchError& e) {
    return fail(kExitNonConvergence, error_json(e.kind(), e.what()));
  } catch (const ridge::Error& e) {
    return fail(kExitValidation, error_json(e.kind(), e.what()));
  } catch (const json::exception& e) {
    return fail(kExitValidation, error_json("json", e.what()));
  } catch (const fs::filesystem_error& e) {
    return fail(kExitValidation, error_json("io", e.what()));
  }
  return kExitValidation;
}
