// contactqd: scenario-driven simulator for conservative and dissipative
// dynamics of finite-level pure states (projective Hamiltonian flow and its
// contact extension).
//
//   contactqd simulate        integrate a scenario, write a CSV time series
//   contactqd portrait        sample the qubit phase portrait (both charts)
//   contactqd critical-points closed-form critical-point census
//   contactqd verify          run the property battery
//
// Exit codes: 0 ok, 2 scenario/usage error, 3 integration failure,
// 1 failed verification or unsupported request.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include "contactqd/analysis.hpp"
#include "contactqd/csv.hpp"
#include "contactqd/dynamics.hpp"
#include "contactqd/scenario.hpp"
#include "contactqd/verify.hpp"

namespace {

struct QubitParams {
  double h1, h2, hbar, gamma;
  cqd::Complex v;
};

QubitParams qubit_params(const cqd::Scenario& sc) {
  if (sc.n != 2)
    throw cqd::UnsupportedScenario("this command handles 2-level scenarios");
  if (sc.dissipation == cqd::Scenario::Dissipation::general_poly)
    throw cqd::UnsupportedScenario(
        "portraits/censuses need dissipation none or linear");
  QubitParams p;
  p.h1 = sc.hamiltonian(0, 0).real();
  p.h2 = sc.hamiltonian(1, 1).real();
  p.v = sc.hamiltonian(0, 1);
  p.hbar = sc.hbar;
  p.gamma =
      sc.dissipation == cqd::Scenario::Dissipation::linear ? sc.gamma : 0.0;
  return p;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_path,
                 double tol) {
  const cqd::Scenario sc = cqd::load_scenario(scenario_path);
  const cqd::ContactHamiltonianSpec spec = cqd::make_spec(sc);
  const cqd::ExtendedState e0 = cqd::make_initial(sc);
  cqd::StepControl ctrl;
  if (tol > 0.0) ctrl.abs_tol = ctrl.rel_tol = tol;
  const auto ts = cqd::uniform_samples(0.0, sc.t_end, sc.samples);
  const cqd::Trajectory tr = cqd::integrate(spec, e0, 0.0, sc.t_end, ts, ctrl);
  const auto rows = cqd::trajectory_observables(tr, spec.H);
  cqd::atomic_write(out_path, cqd::simulation_csv(sc, tr, rows));
  if (!tr.chart_switch_events.empty())
    std::cerr << "note: " << tr.chart_switch_events.size()
              << " chart switch(es) during integration\n";
  return 0;
}

int cmd_portrait(const std::string& scenario_path, const std::string& out_path,
                 const std::string& grid, const std::string& window) {
  const cqd::Scenario sc = cqd::load_scenario(scenario_path);
  const QubitParams p = qubit_params(sc);
  cqd::PortraitOptions opt;
  if (!grid.empty()) {
    if (std::sscanf(grid.c_str(), "%dx%d", &opt.nx, &opt.ny) != 2 ||
        opt.nx < 1 || opt.ny < 1)
      throw cqd::ParseError("--grid expects NxM with positive integers");
  }
  if (!window.empty()) {
    if (std::sscanf(window.c_str(), "%lf,%lf,%lf,%lf", &opt.x0, &opt.x1,
                    &opt.y0, &opt.y1) != 4 ||
        !(opt.x1 > opt.x0) || !(opt.y1 > opt.y0))
      throw cqd::ParseError("--window expects x0,x1,y0,y1 with x0<x1, y0<y1");
  }
  const cqd::Portrait portrait =
      cqd::phase_portrait(p.h1, p.h2, p.v, p.gamma, p.hbar, opt);
  cqd::atomic_write(out_path, cqd::portrait_csv(portrait));
  return 0;
}

int cmd_critical_points(const std::string& scenario_path,
                        const std::string& out_path) {
  const cqd::Scenario sc = cqd::load_scenario(scenario_path);
  const QubitParams p = qubit_params(sc);
  std::ostringstream os;
  const auto census = cqd::qubit_census(p.h1, p.h2, p.v, p.gamma, p.hbar);
  if (p.gamma > 0.0 && p.h1 == p.h2 && std::abs(p.v) != 0.0) {
    const auto rep = cqd::classify_bifurcation(p.v, p.gamma, p.hbar);
    os << "regime " << rep.regime_name << " (Delta = "
       << cqd::csv_num(rep.delta_minus);
    if (rep.regime_name == "iii")
      os << ", " << (rep.foci_subcase ? "foci" : "nodes") << " sub-case";
    os << ")\n";
  }
  for (const auto& c : census) {
    os << "chart " << c.chart << "  z = " << cqd::csv_num(c.z.real())
       << (c.z.imag() >= 0 ? " + " : " - ")
       << cqd::csv_num(std::abs(c.z.imag())) << "i  " << cqd::to_string(c.type);
    if (c.field_singular) {
      os << "  (singular point of the coupling field)";
    } else {
      os << "  eigenvalues (" << cqd::csv_num(c.eigenvalues[0].real()) << ","
         << cqd::csv_num(c.eigenvalues[0].imag()) << ") ("
         << cqd::csv_num(c.eigenvalues[1].real()) << ","
         << cqd::csv_num(c.eigenvalues[1].imag()) << ")";
    }
    os << "\n";
  }
  if (out_path.empty())
    std::cout << os.str();
  else
    cqd::atomic_write(out_path, os.str());
  return 0;
}

int cmd_verify(std::uint64_t seed, double tol_scale, const std::string& only,
               const std::string& out_path) {
  static const char* kBlocks[] = {"brackets", "geometry", "fields",
                                  "potential", "master", "decay", "lifts"};
  if (!only.empty()) {
    bool known = false;
    for (const char* b : kBlocks) known = known || only == b;
    if (!known) {
      std::cerr << "unknown block '" << only << "'; valid:";
      for (const char* b : kBlocks) std::cerr << " " << b;
      std::cerr << "\n";
      return 2;
    }
  }
  const auto checks = cqd::run_verification(seed, tol_scale, only);
  std::ostringstream os;
  os << "block      | check                                        | "
        "max residual | tolerance | result\n";
  for (const auto& c : checks) {
    char line[160];
    std::snprintf(line, sizeof line, "%-10s | %-44s | %12.3e | %9.1e | %s\n",
                  c.block.c_str(), c.name.c_str(), c.max_residual, c.tolerance,
                  c.pass ? "pass" : "FAIL");
    os << line;
  }
  const bool ok = cqd::all_pass(checks);
  os << (ok ? "all checks passed\n" : "FAILURES present\n");
  std::cout << os.str();
  if (!out_path.empty()) cqd::atomic_write(out_path, os.str());
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "contactqd: projective quantum dynamics with contact-type dissipation"};
  app.require_subcommand(1);

  std::string scenario_path, out_path, grid, window, only;
  double tol = 0.0;
  std::uint64_t seed = 20240101;

  auto* sim = app.add_subcommand("simulate", "integrate a scenario to CSV");
  sim->add_option("--scenario", scenario_path, "scenario file")->required();
  sim->add_option("--out", out_path, "output CSV path")->required();
  sim->add_option("--tol", tol, "integrator abs/rel tolerance");

  auto* por = app.add_subcommand("portrait", "phase-portrait CSV (qubit)");
  por->add_option("--scenario", scenario_path, "scenario file")->required();
  por->add_option("--out", out_path, "output CSV path")->required();
  por->add_option("--grid", grid, "grid as NxM (default 21x21)");
  por->add_option("--window", window, "window as x0,x1,y0,y1");

  auto* crit =
      app.add_subcommand("critical-points", "critical-point census (qubit)");
  crit->add_option("--scenario", scenario_path, "scenario file")->required();
  crit->add_option("--out", out_path, "output path (default stdout)");

  auto* ver = app.add_subcommand("verify", "run the property battery");
  ver->add_option("--seed", seed, "RNG seed");
  ver->add_option("--tol", tol, "tolerance scale factor (default 1)");
  ver->add_option("--only", only, "run a single block");
  ver->add_option("--out", out_path, "also write the report here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(scenario_path, out_path, tol);
    if (por->parsed()) return cmd_portrait(scenario_path, out_path, grid, window);
    if (crit->parsed()) return cmd_critical_points(scenario_path, out_path);
    if (ver->parsed())
      return cmd_verify(seed, tol > 0.0 ? tol : 1.0, only, out_path);
  } catch (const cqd::ParseError& err) {
    std::cerr << "scenario error";
    if (err.line > 0) std::cerr << " (line " << err.line << ")";
    std::cerr << ": " << err.what() << "\n";
    return 2;
  } catch (const cqd::StepFailure& err) {
    std::cerr << "integration failed at t = " << err.t_reached << ": "
              << err.what() << "\n";
    return 3;
  } catch (const cqd::ChartSingular& err) {
    std::cerr << "integration failed: " << err.what() << "\n";
    return 3;
  } catch (const cqd::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
