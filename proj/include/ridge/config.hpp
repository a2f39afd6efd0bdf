#pragma once

// Run configuration read from JSON. Every section is optional; missing keys
// take the defaults below. Unknown keys are errors, and every violation in a
// file is reported at once.
//
//   {
//     "params":   {"sigma": 0.01, "L": 1.0, "alpha": 0.2},
//     "grid":     {"n_x": 65, "n_y": 129, "y_max": null},
//     "boundary": {"family": "quadratic_bump", "fraction": 0.05, "a": null,
//                  "V0": [], "W0": []},
//     "solve":    {"max_iterations": 4000, "gradient_tolerance": 1e-7,
//                  "memory": 12, "preconditioner_refresh": 20,
//                  "continuation_ladder": [1, 0.3, 0.1, 0.03],
//                  "seed": 0, "init_noise": 0},
//     "certify":  {"tol_disc_constant": 0.01},
//     "sweep":    {"epsilons": [...], "alphas": [...], "workers": 1},
//     "output":   {"directory": null},
//     "require_size_condition": false
//   }
//
// y_max null means default_y_max(alpha). Boundary "a" is the physical
// amplitude and overrides "fraction" (the amplitude as a fraction of
// b alpha^{2/3}); "tabulated" takes rescaled V0, W0 of length n_x.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ridge/boundary.hpp"
#include "ridge/certificate.hpp"
#include "ridge/grid.hpp"
#include "ridge/io.hpp"
#include "ridge/params.hpp"
#include "ridge/solve.hpp"
#include "ridge/sweep.hpp"

namespace ridge {

enum class BoundaryChoice { zero, quadratic_bump, tabulated };

inline const char* to_string(BoundaryChoice c) {
  switch (c) {
    case BoundaryChoice::zero: return "zero";
    case BoundaryChoice::quadratic_bump: return "quadratic_bump";
    case BoundaryChoice::tabulated: return "tabulated";
  }
  return "unknown";
}

inline std::vector<double> default_ladder() { return {1.0, 0.3, 0.1, 0.03}; }

struct RunConfig {
  double sigma = 0.01;
  double L = 1.0;
  double alpha = 0.2;

  std::size_t n_x = 65;
  std::size_t n_y = 129;
  std::optional<double> y_max;

  BoundaryChoice boundary = BoundaryChoice::quadratic_bump;
  double fraction = 0.05;
  std::optional<double> a;
  std::vector<double> V0, W0;

  SolveOptions solve = [] {
    SolveOptions s;
    s.continuation_ladder = default_ladder();
    return s;
  }();
  double tol_disc_constant = kTolDiscConstant;

  std::vector<double> epsilons = {0.1, 0.05, 0.03, 0.02, 0.01};
  std::vector<double> alphas = {0.2};
  std::size_t workers = 1;

  std::optional<std::string> output_directory;
  bool require_size_condition = false;

  double epsilon() const { return sigma / L; }
  GridSpec grid() const { return GridSpec(n_x, n_y, y_max.value_or(default_y_max(alpha))); }
  DiscreteTolerance tolerance() const { return DiscreteTolerance{tol_disc_constant}; }

  BoundaryData boundary_data(const GridSpec& g) const {
    switch (boundary) {
      case BoundaryChoice::zero: return zero_boundary(g, alpha);
      case BoundaryChoice::tabulated: return tabulated_boundary(g, alpha, V0, W0);
      case BoundaryChoice::quadratic_bump: break;
    }
    return quadratic_bump(g, alpha, effective_fraction());
  }

  // Bump amplitude as a fraction of b alpha^{2/3}, from "a" when given.
  double effective_fraction() const {
    if (!a) return fraction;
    const auto p = rescale_params(sigma, L, alpha, *a);
    return p.A / size_bound_rescaled(alpha);
  }

  ProblemParams params(const BoundaryData& b) const {
    auto p = rescale_params(sigma, L, alpha, 0.0);
    p.A = b.A_measured();
    p.a = p.A * p.y_scale();
    return p;
  }

  SweepSpec sweep_spec() const {
    SweepSpec s;
    s.epsilons = epsilons;
    s.alphas = alphas;
    s.n_x = n_x;
    s.n_y = n_y;
    s.y_max = y_max;
    s.L = L;
    s.family = boundary == BoundaryChoice::zero ? BoundaryFamily::zero : BoundaryFamily::quadratic_bump;
    s.size_fraction = effective_fraction();
    s.solve = solve;
    s.tolerance = tolerance();
    s.workers = workers;
    return s;
  }
};

namespace detail {

class ConfigReader {
public:
  std::vector<std::string> errors;

  // Object at `key` of `parent`, after checking its keys against `allowed`.
  const json* section(const json& parent, const std::string& key, std::initializer_list<const char*> allowed) {
    if (!parent.contains(key)) return nullptr;
    const json& s = parent.at(key);
    if (!s.is_object()) {
      errors.push_back("'" + key + "' must be an object");
      return nullptr;
    }
    check_keys(s, key + ".", allowed);
    return &s;
  }

  void check_keys(const json& obj, const std::string& prefix, std::initializer_list<const char*> allowed) {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : obj.items())
      if (!ok.count(k)) errors.push_back("unknown key '" + prefix + k + "'");
  }

  template <class T>
  void read(const json* s, const std::string& prefix, const char* key, T& out) {
    if (!s || !s->contains(key)) return;
    const json& v = s->at(key);
    try {
      if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw std::invalid_argument("");
      } else if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw std::invalid_argument("");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::invalid_argument("");
      } else if constexpr (std::is_same_v<T, std::vector<double>>) {
        if (!v.is_array()) throw std::invalid_argument("");
        for (const auto& e : v)
          if (!e.is_number()) throw std::invalid_argument("");
      }
      out = v.get<T>();
    } catch (const std::exception&) {
      errors.push_back("'" + prefix + key + "' has the wrong type: " + v.dump());
    }
  }

  template <class T>
  void read_optional(const json* s, const std::string& prefix, const char* key, std::optional<T>& out) {
    if (!s || !s->contains(key)) return;
    if (s->at(key).is_null()) {
      out.reset();
      return;
    }
    T tmp{};
    const auto before = errors.size();
    read(s, prefix, key, tmp);
    if (errors.size() == before) out = tmp;
  }
};

}  // namespace detail

inline RunConfig parse_config(const json& j) {
  RunConfig c;
  detail::ConfigReader r;
  if (!j.is_object()) throw ValidationError({"config must be a JSON object"});
  r.check_keys(j, "",
               {"params", "grid", "boundary", "solve", "certify", "sweep", "output", "require_size_condition"});

  const json* p = r.section(j, "params", {"sigma", "L", "alpha"});
  r.read(p, "params.", "sigma", c.sigma);
  r.read(p, "params.", "L", c.L);
  r.read(p, "params.", "alpha", c.alpha);

  const json* g = r.section(j, "grid", {"n_x", "n_y", "y_max"});
  r.read(g, "grid.", "n_x", c.n_x);
  r.read(g, "grid.", "n_y", c.n_y);
  r.read_optional(g, "grid.", "y_max", c.y_max);

  const json* b = r.section(j, "boundary", {"family", "fraction", "a", "V0", "W0"});
  if (b && b->contains("family")) {
    const json& f = b->at("family");
    if (f == "zero") c.boundary = BoundaryChoice::zero;
    else if (f == "quadratic_bump") c.boundary = BoundaryChoice::quadratic_bump;
    else if (f == "tabulated") c.boundary = BoundaryChoice::tabulated;
    else r.errors.push_back("'boundary.family' must be zero, quadratic_bump or tabulated, got " + f.dump());
  }
  r.read(b, "boundary.", "fraction", c.fraction);
  r.read_optional(b, "boundary.", "a", c.a);
  r.read(b, "boundary.", "V0", c.V0);
  r.read(b, "boundary.", "W0", c.W0);

  const json* s = r.section(j, "solve",
                            {"max_iterations", "gradient_tolerance", "memory", "preconditioner_refresh",
                             "continuation_ladder", "seed", "init_noise"});
  r.read(s, "solve.", "max_iterations", c.solve.max_iterations);
  r.read(s, "solve.", "gradient_tolerance", c.solve.gradient_tolerance);
  r.read(s, "solve.", "memory", c.solve.memory);
  r.read(s, "solve.", "preconditioner_refresh", c.solve.preconditioner_refresh);
  r.read(s, "solve.", "continuation_ladder", c.solve.continuation_ladder);
  r.read(s, "solve.", "seed", c.solve.seed);
  r.read(s, "solve.", "init_noise", c.solve.init_noise);

  const json* ce = r.section(j, "certify", {"tol_disc_constant"});
  r.read(ce, "certify.", "tol_disc_constant", c.tol_disc_constant);

  const json* sw = r.section(j, "sweep", {"epsilons", "alphas", "workers"});
  r.read(sw, "sweep.", "epsilons", c.epsilons);
  r.read(sw, "sweep.", "alphas", c.alphas);
  r.read(sw, "sweep.", "workers", c.workers);

  const json* o = r.section(j, "output", {"directory"});
  r.read_optional(o, "output.", "directory", c.output_directory);

  if (j.contains("require_size_condition")) r.read(&j, "", "require_size_condition", c.require_size_condition);

  // Semantic checks.
  auto& e = r.errors;
  if (!(c.sigma > 0.0)) e.push_back("params.sigma must be positive");
  if (!(c.L > 0.0)) e.push_back("params.L must be positive");
  if (!(c.alpha > 0.0)) e.push_back("params.alpha must be positive");
  if (c.sigma > 0.0 && c.L > 0.0 && c.sigma > c.L) e.push_back("params.sigma must not exceed params.L");
  if (c.n_x < 5 || c.n_x % 2 == 0) e.push_back("grid.n_x must be odd and >= 5");
  if (c.n_y < 5) e.push_back("grid.n_y must be >= 5");
  if (c.y_max && !(*c.y_max > 0.0)) e.push_back("grid.y_max must be positive");
  if (!(c.fraction >= 0.0)) e.push_back("boundary.fraction must be non-negative");
  if (c.a && !(*c.a >= 0.0)) e.push_back("boundary.a must be non-negative");
  if (c.boundary == BoundaryChoice::tabulated) {
    if (c.V0.size() != c.n_x || c.W0.size() != c.n_x) e.push_back("boundary.V0 and boundary.W0 must have n_x entries");
    else if (c.V0.front() != 0.0 || c.V0.back() != 0.0 || c.W0.front() != 0.0 || c.W0.back() != 0.0)
      e.push_back("boundary.V0 and boundary.W0 must vanish at X = +-1");
  } else if (!c.V0.empty() || !c.W0.empty()) {
    e.push_back("boundary.V0 and boundary.W0 are only allowed with family tabulated");
  }
  if (!(c.tol_disc_constant >= 0.0)) e.push_back("certify.tol_disc_constant must be non-negative");
  for (double x : c.epsilons)
    if (!(x > 0.0)) e.push_back("sweep.epsilons must be positive");
  for (double x : c.alphas)
    if (!(x > 0.0)) e.push_back("sweep.alphas must be positive");
  if (c.workers == 0) e.push_back("sweep.workers must be at least 1");
  try {
    c.solve.validate();
  } catch (const ValidationError& v) {
    for (const auto& m : v.violations()) e.push_back("solve: " + m);
  }

  if (e.empty() && c.require_size_condition) {
    const double bound = size_bound_rescaled(c.alpha);
    double A = 0.0;
    if (c.boundary == BoundaryChoice::quadratic_bump) A = c.effective_fraction() * bound;
    if (c.boundary == BoundaryChoice::tabulated) A = BoundaryData{c.alpha, c.V0, c.W0, {}}.A_measured();
    if (!size_condition_holds(A, c.alpha)) {
      const double s = std::cbrt(c.sigma) * std::cbrt(c.L * c.L);
      e.push_back("size condition violated: a = " + format_double(A * s) + " exceeds b sigma^{1/3} L^{2/3} alpha^{2/3} = " +
                  format_double(bound * s) + " (b = " + format_double(kSizeConstantB) + ")");
    }
  }
  if (!e.empty()) throw ValidationError(std::move(e));
  return c;
}

// require_size_condition = true forces strict mode regardless of the file.
inline RunConfig load_config(const std::filesystem::path& path, bool require_size_condition = false) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& ex) {
    throw ValidationError({"config " + path.string() + " is not valid JSON: " + ex.what()});
  }
  if (require_size_condition && j.is_object()) j["require_size_condition"] = true;
  return parse_config(j);
}

// Normalized form: every key present, defaults filled in.
inline json to_json(const RunConfig& c) {
  auto opt = [](const auto& o) { return o ? json(*o) : json(nullptr); };
  return json{
      {"params", {{"sigma", c.sigma}, {"L", c.L}, {"alpha", c.alpha}}},
      {"grid", {{"n_x", c.n_x}, {"n_y", c.n_y}, {"y_max", opt(c.y_max)}}},
      {"boundary",
       {{"family", to_string(c.boundary)}, {"fraction", c.fraction}, {"a", opt(c.a)}, {"V0", c.V0}, {"W0", c.W0}}},
      {"solve",
       {{"max_iterations", c.solve.max_iterations},
        {"gradient_tolerance", c.solve.gradient_tolerance},
        {"memory", c.solve.memory},
        {"preconditioner_refresh", c.solve.preconditioner_refresh},
        {"continuation_ladder", c.solve.continuation_ladder},
        {"seed", c.solve.seed},
        {"init_noise", c.solve.init_noise}}},
      {"certify", {{"tol_disc_constant", c.tol_disc_constant}}},
      {"sweep", {{"epsilons", c.epsilons}, {"alphas", c.alphas}, {"workers", c.workers}}},
      {"output", {{"directory", opt(c.output_directory)}}},
      {"require_size_condition", c.require_size_condition}};
}

}  // namespace ridge
