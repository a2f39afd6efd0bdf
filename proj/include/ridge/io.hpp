#pragma once

// Serialization: versioned JSON records, .npy field snapshots with a JSON
// sidecar, sweep CSV, and atomic file replacement.
//
// Snapshot layout: one float64 little-endian array of shape (3, n_Y, n_X) in C
// order, components U, V, W; element [c][j][i] is component c at X_i, Y_j.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "ridge/boundary.hpp"
#include "ridge/certificate.hpp"
#include "ridge/constants.hpp"
#include "ridge/energy.hpp"
#include "ridge/grid.hpp"
#include "ridge/params.hpp"
#include "ridge/solve.hpp"
#include "ridge/sweep.hpp"

namespace ridge {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

class IoError : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "io"; }
};

// Writes to a temporary file in the target directory, then renames it over
// the target, so readers never see a partial file.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json read_json(const std::filesystem::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw IoError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

// 17 significant digits, enough for a lossless double round trip.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// JSON has no infinities; they are written as null.
inline json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json array_or_null(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(finite_or_null(x));
  return a;
}

inline json dump_schema(const char* name) { return json{{"schema", name}, {"schema_version", kSchemaVersion}}; }

// ---------------------------------------------------------------------------
// Records

inline json to_json(const ProblemParams& p) {
  return json{{"sigma", p.sigma}, {"L", p.L}, {"alpha", p.alpha}, {"a", p.a}, {"epsilon", p.epsilon}, {"A", p.A}};
}

inline json to_json(const GridSpec& g) {
  return json{{"n_x", g.n_x()}, {"n_y", g.n_y()}, {"y_max", g.y_max()}, {"h_x", g.h_x()}, {"h_y", g.h_y()}};
}

inline json to_json(const BoundaryData& b) {
  return json{{"alpha", b.alpha}, {"A_measured", b.A_measured()}, {"V0", b.V0}, {"W0", b.W0}, {"slope", b.slope}};
}

// Flat key -> number record.
inline json to_json(const EnergyBreakdown& e) {
  json j{{"schema_version", kSchemaVersion}};
  for (std::size_t k = 0; k < kTermCount; ++k) j[kTermNames[k]] = e.terms[k];
  j["total_I"] = e.total_I;
  j["reduced_E"] = e.reduced_E;
  j["E_b"] = e.E_b;
  j["E_s"] = e.E_s;
  return j;
}

inline json to_json(const MarginReport& m) {
  return json{{"min_margin", m.min_margin}, {"worst_relative", m.worst_relative}, {"at_x", m.at_x},
              {"at_y", m.at_y},             {"checked", m.checked},               {"pass", m.pass}};
}

inline json to_json(const Lemma2Report& r) {
  return json{{"mu", finite_or_null(r.mu)}, {"mu_star", r.mu_star}, {"bound", r.bound},
              {"margin", r.margin},          {"status", to_string(r.status)}};
}

inline json to_json(const Certificate& c, bool with_profiles = true) {
  json j = dump_schema("ridge.certificate");
  j["pass"] = c.pass;
  j["alpha"] = c.alpha;
  j["A"] = c.A;
  j["epsilon"] = c.epsilon;
  j["total_I"] = c.total_I;
  j["reduced_E"] = c.reduced_E;
  j["E_b"] = c.E_b;
  j["E_s"] = c.E_s;
  j["mu"] = finite_or_null(c.mu);
  j["kappa_mu"] = c.kappa_mu;
  j["Y_tilde"] = finite_or_null(c.Y_tilde);
  j["tol_disc"] = c.tol_disc;
  j["size_condition_ok"] = c.size_condition_ok;
  j["lemma1"] = to_json(c.lemma1);
  j["local_bound"] = to_json(c.local_bound);
  j["poincare"] = to_json(c.poincare);
  j["jensen"] = json{{"margin", c.jensen_margin}, {"pass", c.jensen_pass}};
  j["lemma2"] = to_json(c.lemma2);
  j["theorem"] = json{{"bound", c.theorem_bound},
                      {"margin", c.theorem_margin},
                      {"applies", c.size_condition_ok},
                      {"pass", c.theorem_pass}};
  j["appendix"] = json{{"margin", c.appendix_margin}, {"pass", c.appendix_pass}};
  if (with_profiles) {
    j["rho_profile"] = array_or_null(c.rho_profile);
    j["tau_profile"] = array_or_null(c.tau_profile);
    j["norm_profile"] = array_or_null(c.norm_profile);
  }
  return j;
}

// Fields go to the snapshot, not into this record.
inline json to_json(const MinimizeResult& r) {
  json j = dump_schema("ridge.minimize");
  j["converged"] = r.converged;
  j["status"] = to_string(r.status);
  j["iterations"] = r.iterations;
  j["final_gradient_norm"] = r.final_gradient_norm;
  j["breakdown"] = to_json(r.breakdown);
  j["energy_history"] = r.energy_history;
  return j;
}

inline json to_json(const ConstantsReport& r) {
  return json{{"convention", to_string(r.convention)},
              {"delta1", r.delta1},
              {"delta2", r.delta2},
              {"lemma1_coefficients", {r.lemma1.p, r.lemma1.q, r.lemma1.r}},
              {"kappa_prefactor", r.kappa_prefactor},
              {"mu_star", r.mu_star},
              {"b", r.b},
              {"mu_star_exact", r.mu_star_exact},
              {"b_exact", r.b_exact},
              {"mu_star_presented", r.mu_star_presented},
              {"b_presented", r.b_presented},
              {"bound_coefficient", r.bound_coefficient}};
}

inline json to_json(const SweepRecord& r) {
  return json{{"index", r.index},
              {"epsilon", r.epsilon},
              {"alpha", r.alpha},
              {"sigma", r.sigma},
              {"L", r.L},
              {"A", r.A},
              {"I_min", r.I_min},
              {"physical_energy", r.physical_energy},
              {"E_b", r.E_b},
              {"E_s", r.E_s},
              {"converged", r.converged},
              {"certificate_pass", r.certificate_pass},
              {"iterations", r.iterations},
              {"final_gradient_norm", r.final_gradient_norm},
              {"status", r.status},
              {"message", r.message},
              {"n_x", r.n_x},
              {"n_y", r.n_y},
              {"y_max", r.y_max}};
}

inline json to_json(const ScalingFit& f) {
  json j = dump_schema("ridge.fit");
  j["parameter"] = f.parameter_name;
  j["exponent"] = f.exponent;
  j["intercept"] = f.intercept;
  j["residual_rms"] = f.residual;
  j["points"] = f.points;
  j["span"] = f.span;
  return j;
}

inline json to_json(const CrossoverResult& r) {
  json j = dump_schema("ridge.crossover");
  j["phi"] = r.phi;
  j["L"] = r.L;
  j["a"] = r.a;
  j["sigma_star"] = r.sigma_star;
  j["epsilon_star"] = r.epsilon_star;
  return j;
}

// ---------------------------------------------------------------------------
// Sweep CSV

inline const std::vector<std::string>& sweep_csv_columns() {
  static const std::vector<std::string> cols = {
      "index", "epsilon", "alpha",      "sigma",            "L",      "A",   "I_min",
      "physical_energy", "E_b", "E_s", "converged", "certificate_pass", "iterations",
      "final_gradient_norm", "status", "n_x", "n_y", "y_max"};
  return cols;
}

inline std::string sweep_csv_header() {
  std::string s;
  for (const auto& c : sweep_csv_columns()) s += (s.empty() ? "" : ",") + c;
  return s + "\n";
}

inline std::string sweep_csv_row(const SweepRecord& r) {
  std::ostringstream o;
  o << r.index << ',' << format_double(r.epsilon) << ',' << format_double(r.alpha) << ','
    << format_double(r.sigma) << ',' << format_double(r.L) << ',' << format_double(r.A) << ','
    << format_double(r.I_min) << ',' << format_double(r.physical_energy) << ',' << format_double(r.E_b) << ','
    << format_double(r.E_s) << ',' << (r.converged ? 1 : 0) << ',' << (r.certificate_pass ? 1 : 0) << ','
    << r.iterations << ',' << format_double(r.final_gradient_norm) << ',' << r.status << ',' << r.n_x << ','
    << r.n_y << ',' << format_double(r.y_max) << '\n';
  return o.str();
}

inline std::vector<SweepRecord> parse_sweep_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line + "\n" != sweep_csv_header())
    throw IoError("sweep CSV header does not match the documented columns");
  std::vector<SweepRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() != sweep_csv_columns().size())
      throw IoError("sweep CSV line " + std::to_string(lineno) + " has " + std::to_string(f.size()) + " fields");
    try {
      SweepRecord r;
      r.index = std::stoul(f[0]);
      r.epsilon = std::stod(f[1]);
      r.alpha = std::stod(f[2]);
      r.sigma = std::stod(f[3]);
      r.L = std::stod(f[4]);
      r.A = std::stod(f[5]);
      r.I_min = std::stod(f[6]);
      r.physical_energy = std::stod(f[7]);
      r.E_b = std::stod(f[8]);
      r.E_s = std::stod(f[9]);
      r.converged = f[10] == "1";
      r.certificate_pass = f[11] == "1";
      r.iterations = std::stoul(f[12]);
      r.final_gradient_norm = std::stod(f[13]);
      r.status = f[14];
      r.n_x = std::stoul(f[15]);
      r.n_y = std::stoul(f[16]);
      r.y_max = std::stod(f[17]);
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw IoError("sweep CSV line " + std::to_string(lineno) + " is malformed");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// .npy snapshots

inline std::string npy_bytes(const FieldSet& f) {
  const GridSpec& g = f.grid();
  std::string header = "{'descr': '<f8', 'fortran_order': False, 'shape': (3, " + std::to_string(g.n_y()) + ", " +
                       std::to_string(g.n_x()) + "), }";
  const std::size_t preamble = 10;
  std::size_t total = preamble + header.size() + 1;
  header.append((64 - total % 64) % 64, ' ');
  header.push_back('\n');
  std::string out("\x93NUMPY\x01\x00", 8);
  const auto hl = static_cast<std::uint16_t>(header.size());
  out.push_back(static_cast<char>(hl & 0xff));
  out.push_back(static_cast<char>(hl >> 8));
  out += header;
  const auto v = f.values();
  static_assert(std::numeric_limits<double>::is_iec559);
  out.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double));
  return out;
}

// Reads back a (3, n_y, n_x) float64 C-order array into a FieldSet on `grid`.
inline FieldSet fields_from_npy(const std::string& bytes, const GridSpec& grid) {
  if (bytes.size() < 10 || bytes.compare(0, 6, "\x93NUMPY") != 0) throw IoError("not an .npy file");
  const auto major = static_cast<unsigned char>(bytes[6]);
  std::size_t hl, start;
  if (major == 1) {
    hl = static_cast<unsigned char>(bytes[8]) | (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
    start = 10;
  } else {
    if (bytes.size() < 12) throw IoError("truncated .npy header");
    hl = 0;
    for (int k = 3; k >= 0; --k) hl = (hl << 8) | static_cast<unsigned char>(bytes[8 + k]);
    start = 12;
  }
  if (bytes.size() < start + hl) throw IoError("truncated .npy header");
  const std::string header = bytes.substr(start, hl);
  if (header.find("'<f8'") == std::string::npos) throw IoError(".npy array must be little-endian float64");
  if (header.find("'fortran_order': False") == std::string::npos) throw IoError(".npy array must be C order");
  const std::string shape = "(3, " + std::to_string(grid.n_y()) + ", " + std::to_string(grid.n_x()) + ")";
  if (header.find(shape) == std::string::npos) throw ShapeError(".npy shape does not match the grid " + shape);
  FieldSet f(grid);
  auto v = f.values();
  const std::size_t nbytes = v.size() * sizeof(double);
  if (bytes.size() - start - hl != nbytes) throw IoError(".npy payload size mismatch");
  std::memcpy(v.data(), bytes.data() + start + hl, nbytes);
  return f;
}

struct Snapshot {
  FieldSet fields;
  BoundaryData boundary;
  ProblemParams params;
};

inline json snapshot_sidecar(const Snapshot& s, const std::string& array_file) {
  json j = dump_schema("ridge.snapshot");
  j["array"] = array_file;
  j["field_order"] = {"U", "V", "W"};
  j["layout"] = "float64 (3, n_y, n_x), C order, element [c][j][i] at X_i, Y_j";
  j["params"] = to_json(s.params);
  j["grid"] = to_json(s.fields.grid());
  j["boundary"] = to_json(s.boundary);
  return j;
}

// Writes <stem>.npy and <stem>.json into `dir`.
inline void write_snapshot(const std::filesystem::path& dir, const std::string& stem, const Snapshot& s) {
  atomic_write(dir / (stem + ".npy"), npy_bytes(s.fields));
  atomic_write(dir / (stem + ".json"), snapshot_sidecar(s, stem + ".npy").dump(2) + "\n");
}

inline Snapshot read_snapshot(const std::filesystem::path& sidecar) {
  const json j = read_json(sidecar);
  try {
    if (j.at("schema") != "ridge.snapshot") throw IoError("not a snapshot sidecar: " + sidecar.string());
    const auto& gj = j.at("grid");
    const GridSpec g(gj.at("n_x").get<std::size_t>(), gj.at("n_y").get<std::size_t>(), gj.at("y_max").get<double>());
    const auto& pj = j.at("params");
    ProblemParams p;
    p.sigma = pj.at("sigma");
    p.L = pj.at("L");
    p.alpha = pj.at("alpha");
    p.a = pj.at("a");
    p.epsilon = pj.at("epsilon");
    p.A = pj.at("A");
    const auto& bj = j.at("boundary");
    BoundaryData b{bj.at("alpha").get<double>(), bj.at("V0").get<std::vector<double>>(),
                   bj.at("W0").get<std::vector<double>>(), bj.at("slope").get<std::vector<double>>()};
    validate_boundary(b, g);
    const auto array = sidecar.parent_path() / j.at("array").get<std::string>();
    return Snapshot{fields_from_npy(read_file(array), g), std::move(b), p};
  } catch (const json::exception& e) {
    throw IoError("malformed snapshot sidecar " + sidecar.string() + ": " + e.what());
  }
}

}  // namespace ridge
