// One PASS/FAIL line per acceptance criterion; nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "leakywire/leakywire.hpp"

using namespace leakywire;

namespace {

struct Outcome {
  bool ok;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit;  // seconds
  std::function<Outcome()> run;
};

std::string num(double v, int prec = 8) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

Curve bump() { return Curve::planar(CurvatureProfile::gaussian(1.0, 1.0)); }

SolveConfig bump_config(double L, std::size_t N) {
  SolveConfig cfg;
  cfg.alpha = 0.0;
  cfg.grid = GridSpec(L, N);
  return cfg;
}

Outcome straight_line() {
  bool ok = true;
  std::string d;
  for (double alpha : {-0.5, 0.0, 0.3}) {
    const auto r = straight_line_oracle(alpha, GridSpec(16, 512), 20);
    ok = ok && r.passed;
    d += "alpha=" + num(alpha) + " max|l1-s|=" + num(r.measured, 3) + (r.passed ? " " : " (fail) ");
  }
  const double z = zeta0(0.0);
  const double closed = -4.0 * std::exp(2.0 * kPsi1);
  const bool six = std::abs(z - closed) <= 1e-12 && std::abs(z - (-1.26095)) < 5e-6;
  ok = ok && six;
  d += "zeta0(0)=" + num(z, 6);
  return {ok, d};
}

Outcome curvature_binding(BoundState& ground) {
  const auto coarse = find_bound_states(bump(), bump_config(24, 1024));
  if (coarse.empty()) return {false, "no bound state at (1024, 24)"};
  const auto fine = find_bound_states(bump(), bump_config(36, 2048));
  if (fine.empty()) return {false, "no bound state at (2048, 36)"};
  ground = coarse.front();
  const double z0 = std::abs(zeta0(0.0));
  const double rel = std::abs(coarse.front().energy - fine.front().energy) / std::abs(fine.front().energy);
  const bool ok = coarse.front().gap > 1e-4 * z0 && rel <= 1e-3;
  return {ok, "E(1024,24)=" + num(coarse.front().energy, 10) + " E(2048,36)=" + num(fine.front().energy, 10) +
                  " gap/|zeta0|=" + num(coarse.front().gap / z0, 4) + " rel=" + num(rel, 3)};
}

Outcome scaling() {
  const auto r = scaling_inequality_check(bump(), 1.2, {0.2, 0.1, 0.05});
  return {r.passed, "form(0.05)=" + num(r.measured, 4) + ";" + r.details.substr(r.details.find(';') + 1, 80)};
}

Outcome kernel() {
  const auto r = kernel_property_scan(bump(), {1.2, 1.8, 2.4}, GridSpec(16, 512));
  return {r.passed, "min entry=" + num(r.measured, 3) + (r.passed ? "" : " " + r.details.substr(0, 120))};
}

Outcome macdonald() {
  bool ok = true;
  std::string d;
  for (auto [r, u, k] : {std::tuple{1.0, 0.0, 1.0}, std::tuple{0.5, 1.0, 2.0}, std::tuple{2.0, 0.3, 0.7}}) {
    const auto rep = macdonald_check(r, u, k, 1e-6);
    ok = ok && rep.passed;
    d += "|diff|(" + num(r) + "," + num(u) + "," + num(k) + ")=" + num(std::abs(rep.measured - rep.expected), 2) + " ";
  }
  const double lhs = green3(1.0, 1.0);
  ok = ok && std::abs(lhs - std::exp(-1.0) / (4.0 * std::numbers::pi)) <= 1e-15;
  d += "LHS(1,0,1)=" + num(lhs, 7);
  return {ok, d};
}

Outcome boundary(const BoundState& ground) {
  if (ground.h.size() == 0) return {false, "no accepted ground state"};
  const auto rep = bc_report(bump(), GridSpec(24, 1024), ground.kappa_tilde, ground.h, 0.0, {-1.0, -0.5, 0.0, 0.5, 1.0});
  const bool ok = rep.max_residual <= 0.05 && rep.max_xi_rel_error <= 0.02 && rep.max_direction_spread <= 0.05;
  return {ok, "max residual=" + num(rep.max_residual, 3) + " max xi err=" + num(rep.max_xi_rel_error, 3) +
                  " max spread=" + num(rep.max_direction_spread, 3)};
}

Outcome continuity() {
  bool ok = true;
  std::string d;
  for (auto [k1, k2] : {std::pair{1.0, 2.0}, std::pair{1.2, 1.5}, std::pair{0.5, 3.0}}) {
    const auto r = multiplier_continuity_check(GridSpec(24, 1024), k1, k2);
    ok = ok && r.passed;
    d += "(" + num(k1) + "," + num(k2) + "): " + num(r.measured, 6) + "<=" + num(r.expected, 6) + " ";
  }
  const auto tail = lambda_tail_check(QFactory(bump(), GridSpec(24, 1024)), 0.0, 10.0);
  ok = ok && tail.passed;
  d += "lambda1(10 kappa0)=" + num(tail.measured, 5);
  return {ok, d};
}

Outcome audits() {
  const double c_line = check_a1(Curve::straight_line(), {-10, 10}, 401).c_estimate;
  const auto a2 = check_a2(bump(), 0.5, 1.0, 1.0, {-10, 10}, 401);
  std::vector<double> s, k1, k2;
  for (int i = 0; i <= 400; ++i) {
    const double v = -50.0 + 0.25 * i;
    if (std::abs(v) < 1.0) continue;
    s.push_back(v);
    k1.push_back(1.0 / std::abs(v));
    k2.push_back(1.0 / (v * v));
  }
  const auto f1 = check_curvature_decay(s, k1), f2 = check_curvature_decay(s, k2);
  const bool ok = c_line == 1.0 && a2.pass_a2 && !f1.pass && f2.pass;
  return {ok, "c(line)=" + num(c_line, 17) + " a2(bump, mu=1) d=" + num(a2.a2_certificate->d, 4) +
                  (a2.pass_a2 ? " certified" : " not certified") + " beta1=" + num(f1.beta, 4) +
                  (f1.pass ? " pass" : " fail") + " beta2=" + num(f2.beta, 4) + (f2.pass ? " pass" : " fail")};
}

}  // namespace

int main() {
  BoundState ground;
  const std::vector<Criterion> criteria{
      {1, "straight-line spectrum oracle", 10, straight_line},
      {2, "curvature-induced binding and grid convergence", 300, [&] { return curvature_binding(ground); }},
      {3, "scaling inequality", 30, scaling},
      {4, "kernel properties", 30, kernel},
      {5, "Macdonald identity", 5, macdonald},
      {6, "boundary conditions of the ground state", 120, [&] { return boundary(ground); }},
      {7, "norm continuity and lambda tail", 30, continuity},
      {8, "assumption audits", 30, audits},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.time_limit;
    const bool ok = out.ok && in_time;
    if (!ok) ++failures;
    std::printf("%s criterion %d: %s | %s | %.2fs (limit %.0fs)%s\n", ok ? "PASS" : "FAIL", c.id, c.title.c_str(),
                out.detail.c_str(), secs, c.time_limit, in_time ? "" : " exceeded");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
