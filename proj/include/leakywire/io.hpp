#pragma once

// Curve definitions from builtin names or JSON files, result serialization
// and atomic output files.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "leakywire/assumptions.hpp"
#include "leakywire/curve.hpp"
#include "leakywire/eigenfield.hpp"
#include "leakywire/error.hpp"
#include "leakywire/oracle.hpp"
#include "leakywire/solver.hpp"

namespace leakywire {

using Json = nlohmann::json;

namespace detail {

inline std::map<std::string, double> parse_builtin_params(const std::string& text, const std::string& source) {
  std::map<std::string, double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("cli", "bad parameter '" + item + "' in curve '" + source + "'");
    const std::string key = item.substr(0, eq);
    try {
      std::size_t used = 0;
      const double v = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("trailing characters");
      out[key] = v;
    } catch (const std::exception&) {
      throw ConfigError("cli", "parameter '" + key + "' in curve '" + source + "' is not a number");
    }
  }
  return out;
}

inline double take(std::map<std::string, double>& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  if (it == p.end()) return fallback;
  const double v = it->second;
  p.erase(it);
  return v;
}

inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline double number_field(const Json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError("cli", where + ": missing field '" + key + "'");
  if (!obj.at(key).is_number()) throw ConfigError("cli", where + ": field '" + key + "' must be a number");
  return obj.at(key).get<double>();
}

}  // namespace detail

/// Curve from a JSON definition (see README for the schema).
inline Curve curve_from_json(const Json& j, const std::string& where = "curve") {
  if (!j.is_object()) throw ConfigError("cli", where + ": top level must be an object");
  if (!j.contains("family") || !j.at("family").is_string()) throw ConfigError("cli", where + ": missing string field 'family'");
  const std::string family = j.at("family").get<std::string>();
  std::optional<double> hint;
  if (j.contains("domain_hint")) hint = detail::number_field(j, "domain_hint", where);
  try {
    if (family == "straight") return Curve::straight_line();
    if (family == "planar_curvature") {
      if (!j.contains("params") || !j.at("params").is_object()) throw ConfigError("cli", where + ": missing object field 'params'");
      const Json& p = j.at("params");
      if (!p.contains("profile") || !p.at("profile").is_string()) throw ConfigError("cli", where + ": params.profile must be a string");
      const std::string profile = p.at("profile").get<std::string>();
      if (profile == "gaussian") {
        return Curve::planar(CurvatureProfile::gaussian(detail::number_field(p, "a", where + ".params"),
                                                        detail::number_field(p, "w", where + ".params")), hint);
      }
      if (profile == "power_tail") {
        return Curve::planar(CurvatureProfile::power_tail(detail::number_field(p, "a", where + ".params"),
                                                          detail::number_field(p, "beta", where + ".params")), hint);
      }
      throw ConfigError("cli", where + ": unknown profile '" + profile + "'");
    }
    if (family == "sampled") {
      if (!j.contains("samples") || !j.at("samples").is_array()) throw ConfigError("cli", where + ": missing array field 'samples'");
      std::vector<std::array<double, 4>> samples;
      for (std::size_t i = 0; i < j.at("samples").size(); ++i) {
        const Json& row = j.at("samples")[i];
        if (!row.is_array() || row.size() != 4) throw ConfigError("cli", where + ": samples[" + std::to_string(i) + "] must be [t,x,y,z]");
        std::array<double, 4> r{};
        for (std::size_t c = 0; c < 4; ++c) {
          if (!row[c].is_number()) throw ConfigError("cli", where + ": samples[" + std::to_string(i) + "] has a non-number");
          r[c] = row[c].get<double>();
        }
        samples.push_back(r);
      }
      return Curve::sampled(samples, hint);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    throw ConfigError("cli", where + ": " + e.what());
  }
  throw ConfigError("cli", where + ": unknown family '" + family + "'");
}

/// Builtin names "straight", "bump[:a=..,w=..]", "power_tail[:a=..,beta=..]",
/// anything else is read as a JSON file.
inline Curve load_curve(const std::string& source) {
  const auto colon = source.find(':');
  const std::string head = source.substr(0, colon);
  const std::string rest = colon == std::string::npos ? std::string() : source.substr(colon + 1);
  if (head == "straight" || head == "bump" || head == "power_tail") {
    auto p = rest.empty() ? std::map<std::string, double>{} : detail::parse_builtin_params(rest, source);
    Curve c = Curve::straight_line();
    try {
      if (head == "bump") {
        const double a = detail::take(p, "a", 1.0), w = detail::take(p, "w", 1.0);
        c = Curve::planar(CurvatureProfile::gaussian(a, w));
      } else if (head == "power_tail") {
        const double a = detail::take(p, "a", 1.0), beta = detail::take(p, "beta", 2.0);
        c = Curve::planar(CurvatureProfile::power_tail(a, beta));
      }
    } catch (const DomainError& e) {
      throw ConfigError("cli", std::string("curve '") + source + "': " + e.what());
    }
    if (!p.empty()) throw ConfigError("cli", "unknown parameter '" + p.begin()->first + "' for curve '" + head + "'");
    return c;
  }
  std::ifstream in(source);
  if (!in) throw ConfigError("cli", "cannot read curve file '" + source + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto [line, col] = detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError("cli", source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON (" + e.what() + ")");
  }
  return curve_from_json(j, source);
}

// --- serialization ----------------------------------------------------------

inline Json grid_json(const GridSpec& g) { return {{"L", g.L()}, {"N", g.N()}}; }

inline Json to_json(const BoundState& s) {
  return {{"kappa", s.kappa_tilde},
          {"energy", s.energy},
          {"gap", s.gap},
          {"branch", s.branch},
          {"residual", s.diagnostics.residual},
          {"threshold_uncertain", s.threshold_uncertain},
          {"bracket", {s.diagnostics.bracket_lo, s.diagnostics.bracket_hi}},
          {"iterations", s.diagnostics.iterations}};
}

inline Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

inline Json to_json(const ConvergenceReport& r) {
  Json levels = Json::array();
  for (const auto& l : r.levels) {
    levels.push_back({{"L", l.L}, {"N", l.N}, {"energy", optional_json(l.energy)}, {"kappa", optional_json(l.kappa)},
                      {"n_states", l.n_states}});
  }
  return {{"levels", levels},
          {"richardson_energy", optional_json(r.richardson_energy)},
          {"observed_order", optional_json(r.observed_order)},
          {"shrink_ratios", r.shrink_ratios},
          {"tail_change", optional_json(r.tail_change)},
          {"tail_estimate", optional_json(r.tail_estimate)},
          {"accepted", r.accepted},
          {"vacuous", r.vacuous},
          {"warnings", r.warnings}};
}

inline Json solve_json(double alpha, const GridSpec& grid, const std::vector<BoundState>& states,
                       const std::optional<ConvergenceReport>& conv = {}) {
  Json arr = Json::array();
  for (const auto& s : states) arr.push_back(to_json(s));
  return {{"alpha", alpha},
          {"zeta0", zeta0(alpha)},
          {"kappa0", kappa0(alpha)},
          {"grid", grid_json(grid)},
          {"states", arr},
          {"convergence", conv ? to_json(*conv) : Json(nullptr)}};
}

inline Json to_json(const ScanResult& r) {
  Json cross = Json::array();
  for (const auto& c : r.crossings) {
    cross.push_back({{"branch", c.branch}, {"kappa", c.kappa}, {"interval", {c.kappa_lo, c.kappa_hi}}, {"direction", c.direction}});
  }
  return {{"alpha", r.alpha},
          {"grid", grid_json(r.curve.grid)},
          {"kappas", r.curve.kappas},
          {"s_kappa", r.curve.s_k_values},
          {"lambdas", r.curve.lambdas},
          {"crossings", cross}};
}

/// Columns kappa, s_kappa, lambda_1 .. lambda_m.
inline std::string scan_csv(const ScanResult& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  const std::size_t m = r.curve.lambdas.empty() ? 0 : r.curve.lambdas.front().size();
  os << "kappa,s_kappa";
  for (std::size_t j = 1; j <= m; ++j) os << ",lambda_" << j;
  os << "\n";
  for (std::size_t k = 0; k < r.curve.kappas.size(); ++k) {
    os << r.curve.kappas[k] << "," << r.curve.s_k_values[k];
    for (double v : r.curve.lambdas[k]) os << "," << v;
    os << "\n";
  }
  return os.str();
}

/// Columns rank, kappa, energy, gap, branch, residual, threshold_uncertain.
inline std::string states_csv(const std::vector<BoundState>& states) {
  std::ostringstream os;
  os << std::setprecision(17) << "rank,kappa,energy,gap,branch,residual,threshold_uncertain\n";
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& s = states[i];
    os << i + 1 << "," << s.kappa_tilde << "," << s.energy << "," << s.gap << "," << s.branch << ","
       << s.diagnostics.residual << "," << (s.threshold_uncertain ? "true" : "false") << "\n";
  }
  return os.str();
}

inline Json to_json(const AssumptionReport& r) {
  Json a2 = nullptr;
  if (r.a2_certificate) {
    const auto& c = *r.a2_certificate;
    a2 = {{"omega", c.omega}, {"epsilon", c.epsilon}, {"mu", c.mu}, {"d", c.d}, {"max_violation", c.max_violation},
          {"n_pairs", c.n_pairs}};
  }
  Json beta = nullptr;
  if (r.beta_fit) beta = std::isfinite(*r.beta_fit) ? Json(*r.beta_fit) : Json("inf");
  return {{"c_estimate", r.c_estimate}, {"a2_certificate", a2}, {"beta_fit", beta},
          {"pass_a1", r.pass_a1},       {"pass_a2", r.pass_a2}, {"pass_decay", r.pass_decay},
          {"s_range", {r.s_range.lo, r.s_range.hi}}, {"n_samples", r.n_samples}};
}

inline Json to_json(const BoundaryReport& r) {
  Json pts = Json::array();
  for (const auto& p : r.points) {
    pts.push_back({{"s", p.s}, {"h", p.h}, {"xi", p.xi}, {"omega", p.omega}, {"residual", p.residual},
                   {"xi_rel_error", p.xi_rel_error}, {"direction_spread", p.direction_spread},
                   {"fit_residual", p.fit_residual}});
  }
  return {{"alpha", r.alpha}, {"kappa", r.kappa}, {"points", pts}, {"max_residual", r.max_residual},
          {"max_xi_rel_error", r.max_xi_rel_error}, {"max_direction_spread", r.max_direction_spread}};
}

inline Json to_json(const OracleReport& r) {
  return {{"name", r.name},         {"passed", r.passed},   {"measured", r.measured}, {"expected", r.expected},
          {"tolerance", r.tolerance}, {"details", r.details}, {"warning", r.warning}};
}

// --- output files ------------------------------------------------------------

/// Writes text to path through a temporary file in the same directory and a rename.
inline void write_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cli", "cannot write '" + tmp.string() + "'");
    out << text;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw ConfigError("cli", "write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ConfigError("cli", "cannot rename output into '" + path + "'");
  }
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

/// Payload to path (or stdout for an empty path); the timestamp goes to
/// path.meta.json so the payload itself is deterministic.
inline void write_results(const std::string& payload, const std::string& path, const std::string& command) {
  if (path.empty()) {
    std::fwrite(payload.data(), 1, payload.size(), stdout);
    return;
  }
  write_atomic(path, payload);
  const Json meta = {{"command", command}, {"generated_at", utc_timestamp()}, {"payload", path}};
  write_atomic(path + ".meta.json", meta.dump(2) + "\n");
}

}  // namespace leakywire
