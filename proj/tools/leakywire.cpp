// leakywire command-line interface.

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "leakywire/leakywire.hpp"

namespace lw = leakywire;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitConfig = 3;

const char* kFooter =
    "CSV columns:\n"
    "  solve: rank,kappa,energy,gap,branch,residual,threshold_uncertain\n"
    "  scan:  kappa,s_kappa,lambda_1,...,lambda_m\n"
    "Exit codes: 0 success, 1 domain or assumption failure, 2 numerical failure, 3 config or I/O error.\n"
    "LEAKYWIRE_THREADS caps the worker thread count.";

struct Options {
  std::string curve = "bump:a=1,w=1";
  double alpha = 0.0;
  std::optional<double> L;
  std::optional<std::size_t> N;
  std::optional<double> kappa_min, kappa_max;
  std::size_t points = 50;
  std::size_t branches = 8;
  double mu = 1.0, omega = 0.5, epsilon = 1.0;
  std::optional<double> s_max;
  std::size_t samples = 401;
  std::string radii = "1e-3:1e-2:8";
  std::size_t angles = 8;
  std::string s_list = "-1,-0.5,0,0.5,1";
  std::string output;
  std::string format = "json";
  double tol_kappa = 1e-10;
  double tol_lambda = 1e-9;
  std::size_t levels = 3;
};

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw lw::ConfigError("cli", flag + ": '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw lw::ConfigError("cli", flag + ": empty list");
  return out;
}

/// "a,b,c" or "min:max:count" (log-spaced).
std::vector<double> parse_radii(const std::string& text) {
  if (text.find(':') == std::string::npos) return parse_list(text, "--radii");
  std::stringstream ss(text);
  std::string a, b, c;
  std::getline(ss, a, ':');
  std::getline(ss, b, ':');
  std::getline(ss, c, ':');
  try {
    return lw::radii_ladder(std::stod(a), std::stod(b), static_cast<std::size_t>(std::stoul(c)));
  } catch (const lw::DomainError& e) {
    throw lw::ConfigError("cli", std::string("--radii: ") + e.what());
  } catch (const std::exception&) {
    throw lw::ConfigError("cli", "--radii: expected min:max:count");
  }
}

double arc_reach(const lw::Curve& c) { return std::max(10.0, std::min(c.domain_hint(), 400.0)); }

lw::ArcInterval audit_range(const lw::Curve& c, const Options& o) {
  double r = o.s_max.value_or(arc_reach(c));
  const auto range = c.arc_range();
  return {std::max(-r, range.lo), std::min(r, range.hi)};
}

lw::GridSpec grid_for(const lw::Curve& c, const Options& o, std::size_t default_n) {
  double L = 0.0;
  if (o.L) {
    L = *o.L;
  } else {
    const double r = std::max(16.0, 2.0 * std::min(c.domain_hint(), 50.0));
    const auto range = c.arc_range();
    const double c_est = lw::check_a1(c, {std::max(-r, range.lo), std::min(r, range.hi)}, 400).c_estimate;
    if (!(c_est > 0.0)) throw lw::DomainError("curve", "chord-arc constant is zero; the curve is not admissible");
    L = std::max(16.0, 10.0 / (lw::kappa0(o.alpha) * c_est));
  }
  const auto range = c.arc_range();
  if (-L < range.lo || L > range.hi) {
    throw lw::ConfigError("cli", "grid [-L, L] exceeds the sampled arc-length range of the curve");
  }
  try {
    return lw::GridSpec(L, o.N.value_or(default_n));
  } catch (const lw::DomainError& e) {
    throw lw::ConfigError("cli", e.what());
  }
}

lw::SolveConfig solve_config(const lw::GridSpec& grid, const Options& o) {
  lw::SolveConfig cfg;
  cfg.alpha = o.alpha;
  cfg.grid = grid;
  cfg.m_branches = o.branches;
  cfg.tol_kappa_rel = o.tol_kappa;
  cfg.tol_lambda = o.tol_lambda;
  cfg.refinement_levels = o.levels;
  cfg.validate();
  return cfg;
}

void require_json(const Options& o, const std::string& cmd) {
  if (o.format != "json") throw lw::ConfigError("cli", cmd + " writes JSON only");
}

std::string dump(const lw::Json& j) { return j.dump(2) + "\n"; }

int run_solve(const Options& o) {
  const auto curve = lw::load_curve(o.curve);
  const auto grid = grid_for(curve, o, 1024);
  const auto states = lw::find_bound_states(curve, solve_config(grid, o));
  lw::write_results(o.format == "csv" ? lw::states_csv(states) : dump(lw::solve_json(o.alpha, grid, states)), o.output,
                    "solve");
  return kExitOk;
}

int run_scan(const Options& o) {
  if (!o.kappa_min || !o.kappa_max) throw lw::ConfigError("cli", "scan requires --kappa-min and --kappa-max");
  const auto curve = lw::load_curve(o.curve);
  const auto grid = grid_for(curve, o, 1024);
  const lw::QFactory factory(curve, grid);
  const auto res = lw::spectrum_scan(factory, solve_config(grid, o), *o.kappa_min, *o.kappa_max, o.points);
  lw::write_results(o.format == "csv" ? lw::scan_csv(res) : dump(lw::to_json(res)), o.output, "scan");
  return kExitOk;
}

int run_check(const Options& o) {
  require_json(o, "check");
  const auto curve = lw::load_curve(o.curve);
  const auto rep = lw::audit_assumptions(curve, audit_range(curve, o), o.samples, o.omega, o.epsilon, o.mu);
  lw::write_results(dump(lw::to_json(rep)), o.output, "check");
  if (!rep.pass_a1 || !rep.pass_a2 || !rep.pass_decay) {
    std::cerr << "leakywire: curve: assumption audit failed (pass_a1=" << rep.pass_a1 << ", pass_a2=" << rep.pass_a2
              << ", pass_decay=" << rep.pass_decay << ")\n";
    return kExitDomain;
  }
  return kExitOk;
}

int run_bc_verify(const Options& o) {
  require_json(o, "bc-verify");
  const auto curve = lw::load_curve(o.curve);
  const auto grid = grid_for(curve, o, 1024);
  const auto states = lw::find_bound_states(curve, solve_config(grid, o));
  if (states.empty()) throw lw::DomainError("eigenfield", "no bound state to verify");
  const auto& g = states.front();
  lw::TraceOptions topt;
  topt.radii = parse_radii(o.radii);
  topt.n_angles = o.angles;
  const auto rep = lw::bc_report(curve, grid, g.kappa_tilde, g.h, o.alpha, parse_list(o.s_list, "--s"), topt);
  lw::Json j = lw::to_json(rep);
  j["state"] = lw::to_json(g);
  j["grid"] = lw::grid_json(grid);
  j["radii"] = topt.radii;
  j["angles"] = topt.n_angles;
  lw::write_results(dump(j), o.output, "bc-verify");
  return kExitOk;
}

int run_converge(const Options& o) {
  require_json(o, "converge");
  const auto curve = lw::load_curve(o.curve);
  const auto grid = grid_for(curve, o, 256);
  const auto cfg = solve_config(grid, o);
  const auto rep = lw::converge_study(curve, cfg);
  lw::Json j = lw::to_json(rep);
  j["alpha"] = o.alpha;
  j["zeta0"] = lw::zeta0(o.alpha);
  j["base_grid"] = lw::grid_json(grid);
  lw::write_results(dump(j), o.output, "converge");
  return kExitOk;
}

int run_verify(const Options& o) {
  require_json(o, "verify");
  const auto curve = lw::load_curve(o.curve);
  if (curve.is_straight()) throw lw::DomainError("oracle", "verify needs a bent curve for the scaling and kernel checks");
  const auto reports = lw::run_oracle_suite(curve);
  lw::Json arr = lw::Json::array();
  bool ok = true;
  for (const auto& r : reports) {
    arr.push_back(lw::to_json(r));
    ok = ok && r.passed;
  }
  lw::write_results(dump(arr), o.output, "verify");
  return ok ? kExitOk : kExitDomain;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bound states of a delta interaction supported on a curve in R^3"};
  app.footer(kFooter);
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool grid, bool solver) {
    sub->add_option("--curve", o.curve, "straight | bump[:a=..,w=..] | power_tail[:a=..,beta=..] | path to JSON")
        ->capture_default_str();
    sub->add_option("--alpha", o.alpha, "Coupling alpha")->capture_default_str();
    if (grid) {
      sub->add_option("-L,--half-length", o.L, "Grid half-length (default max(16, 10/(kappa0 c)))");
      sub->add_option("-N,--grid-n", o.N, "Grid points, even");
    }
    if (solver) {
      sub->add_option("-m,--branches", o.branches, "Tracked eigenvalue branches")->capture_default_str();
      sub->add_option("--tol-kappa", o.tol_kappa, "Relative kappa tolerance")->capture_default_str();
      sub->add_option("--tol-lambda", o.tol_lambda, "Residual tolerance |lambda - alpha|")->capture_default_str();
    }
    sub->add_option("-o,--output", o.output, "Output file (stdout when omitted)");
    sub->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  };

  auto* solve = app.add_subcommand("solve", "Find bound states below the threshold");
  add_common(solve, true, true);
  auto* scan = app.add_subcommand("scan", "Sample lambda_j(kappa) and annotate crossings with alpha");
  add_common(scan, true, true);
  scan->add_option("--kappa-min", o.kappa_min, "Smallest kappa");
  scan->add_option("--kappa-max", o.kappa_max, "Largest kappa");
  scan->add_option("--points", o.points, "Number of kappa samples")->capture_default_str();
  auto* check = app.add_subcommand("check", "Audit the chord-arc, straightness and curvature decay assumptions");
  add_common(check, false, false);
  check->add_option("--mu", o.mu, "Decay exponent mu")->capture_default_str();
  check->add_option("--omega", o.omega, "omega in (0,1)")->capture_default_str();
  check->add_option("--epsilon", o.epsilon, "epsilon > 0")->capture_default_str();
  check->add_option("--s-max", o.s_max, "Audit range [-s_max, s_max]");
  check->add_option("--samples", o.samples, "Arc-length samples")->capture_default_str();
  auto* bc = app.add_subcommand("bc-verify", "Check the boundary condition 2 pi alpha xi = omega on the ground state");
  add_common(bc, true, true);
  bc->add_option("--radii", o.radii, "Comma list or min:max:count")->capture_default_str();
  bc->add_option("--angles", o.angles, "Directions per radius")->capture_default_str();
  bc->add_option("--s", o.s_list, "Comma list of arc-length points")->capture_default_str();
  auto* conv = app.add_subcommand("converge", "Grid refinement study of the ground state (-N is the coarsest level, default 256)");
  add_common(conv, true, true);
  conv->add_option("--levels", o.levels, "Number of N doublings at fixed L")->capture_default_str();
  auto* verify = app.add_subcommand("verify", "Run the oracle suite and emit a JSON array of reports");
  add_common(verify, false, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*solve) return run_solve(o);
    if (*scan) return run_scan(o);
    if (*check) return run_check(o);
    if (*bc) return run_bc_verify(o);
    if (*conv) return run_converge(o);
    if (*verify) return run_verify(o);
  } catch (const lw::ConfigError& e) {
    std::cerr << "leakywire: " << e.what() << "\n";
    return kExitConfig;
  } catch (const lw::DomainError& e) {
    std::cerr << "leakywire: " << e.what() << "\n";
    return kExitDomain;
  } catch (const lw::NumericalFailure& e) {
    std::cerr << "leakywire: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "leakywire: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
