#ifndef CONTACTQD_VERIFY_HPP
#define CONTACTQD_VERIFY_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "contactqd/analysis.hpp"
#include "contactqd/dynamics.hpp"
#include "contactqd/geometry.hpp"
#include "contactqd/master_equation.hpp"
#include "contactqd/operators.hpp"
#include "contactqd/rng.hpp"
#include "contactqd/state_space.hpp"

namespace cqd {

struct VerifyCheck {
  std::string block;
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

namespace verify_detail {

inline ProjectiveState random_state(Rng& rng, Eigen::Index n, double radius) {
  ProjectiveState s;
  s.chart = static_cast<int>(n);
  s.z = rng.complex_vector(n - 1, radius);
  return s;
}

inline ExtendedState random_extended(Rng& rng, Eigen::Index n, double radius) {
  return {random_state(rng, n, radius), rng.uniform(-1.0, 1.0)};
}

inline TangentVector random_tangent(Rng& rng, Eigen::Index n) {
  return {rng.complex_vector(n - 1, 1.0), rng.uniform(-1.0, 1.0)};
}

// real quadratic field with exact derivatives:
// A = z^dag M z + 2 Re(c^dag z) + a2 S^2 + a1 S
inline ScalarField quadratic_field(const Eigen::MatrixXcd& m,
                                   const Eigen::VectorXcd& c, double a2,
                                   double a1) {
  auto value = [m, c, a2, a1](const ExtendedState& e) {
    const Eigen::VectorXcd& z = e.point.z;
    return (z.adjoint() * m * z)(0).real() + 2.0 * c.dot(z).real() +
           a2 * e.S * e.S + a1 * e.S;
  };
  auto dz = [m, c](const ExtendedState& e) {
    return (m.transpose() * e.point.z.conjugate() + c.conjugate()).eval();
  };
  auto dS = [a2, a1](const ExtendedState& e) { return 2.0 * a2 * e.S + a1; };
  return ScalarField::analytic(value, dz, dS);
}

inline double pair_d(const Eigen::VectorXcd& dz_of_field, double dS_of_field,
                     const TangentVector& v) {
  return 2.0 * (dz_of_field.conjugate().dot(v.dz)).real() +
         dS_of_field * v.dS;
}

}  // namespace verify_detail

/// Runs the whole property battery with a seeded deterministic stream.
/// `only` filters by block name (empty = all); `tol_scale` multiplies every
/// tolerance (for exploratory runs; the defaults are the binding ones).
inline std::vector<VerifyCheck> run_verification(std::uint64_t seed,
                                                 double tol_scale = 1.0,
                                                 const std::string& only = "") {
  using namespace verify_detail;
  std::vector<VerifyCheck> checks;
  auto want = [&](const char* block) {
    return only.empty() || only == block;
  };
  auto add = [&](const char* block, const char* name, double residual,
                 double tol) {
    checks.push_back(
        {block, name, residual, tol * tol_scale, residual <= tol * tol_scale});
  };

  // -- brackets ------------------------------------------------------------
  if (want("brackets")) {
    Rng rng(seed ^ 0x1);
    double bridge = 0.0, jordan_bridge = 0.0, antisym = 0.0, sym = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
      const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.uniform() * 4);
      const double hbar = rng.uniform(0.5, 2.0);
      HermitianOperator a{rng.hermitian(n)}, b{rng.hermitian(n)};
      const ProjectiveState s = random_state(rng, n, 1.5);
      const ScalarField ea = ScalarField::expectation(a);
      const ScalarField eb = ScalarField::expectation(b);

      const double pb = poisson(ea, eb, s, hbar);
      const Eigen::MatrixXcd comm =
          (a.matrix() * b.matrix() - b.matrix() * a.matrix()) /
          Complex(0, hbar);
      bridge = std::max(
          bridge,
          std::abs(pb - expectation(HermitianOperator(comm), s)));

      const double jb = jordan(ea, eb, s, hbar);
      const Eigen::MatrixXcd anti =
          a.matrix() * b.matrix() + b.matrix() * a.matrix();
      const double corr = 0.5 * expectation(HermitianOperator(anti), s) -
                          expectation(a, s) * expectation(b, s);
      jordan_bridge = std::max(jordan_bridge,
                               std::abs(-0.5 * hbar * jb - corr));

      antisym = std::max(antisym, std::abs(pb + poisson(eb, ea, s, hbar)));
      sym = std::max(sym, std::abs(jb - jordan(eb, ea, s, hbar)));
    }
    add("brackets", "poisson equals commutator expectation", bridge, 1e-10);
    add("brackets", "jordan equals anticommutator correlation", jordan_bridge,
        1e-10);
    add("brackets", "poisson antisymmetry", antisym, 1e-12);
    add("brackets", "jordan symmetry", sym, 1e-12);
  }

  // -- geometry ------------------------------------------------------------
  if (want("geometry")) {
    Rng rng(seed ^ 0x2);
    double jsq = 0.0, phisq = 0.0, reeb_metric = 0.0, reduction = 0.0;
    double dual_route = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.uniform() * 3);
      const double hbar = rng.uniform(0.5, 2.0);
      const ExtendedState e = random_extended(rng, n, 1.5);
      const TangentVector v = random_tangent(rng, n);

      TangentVector jv = j_fs(j_fs(v));
      jsq = std::max(jsq, (jv.dz + v.dz).cwiseAbs().maxCoeff());

      // phi^2(v) + v - eta(v) xi = 0
      TangentVector pv = phi(e, phi(e, v, hbar), hbar);
      const double ev = eta(e, v, hbar);
      double rs = (pv.dz + v.dz).cwiseAbs().maxCoeff();
      rs = std::max(rs, std::abs(pv.dS + v.dS - ev));
      phisq = std::max(phisq, rs);

      // g(xi, v) = (2/hbar) eta(v)
      reeb_metric = std::max(
          reeb_metric, std::abs(g_ext(e, reeb(e), v, hbar) -
                                2.0 / hbar * eta(e, v, hbar)));

      // extended product reduces to the metric bracket for basic fields
      HermitianOperator a{rng.hermitian(n)}, b{rng.hermitian(n)};
      const ScalarField ea = ScalarField::expectation(a);
      const ScalarField eb = ScalarField::expectation(b);
      reduction = std::max(
          reduction, std::abs(extended_jordan(ea, eb, e, hbar) -
                              jordan(ea, eb, e.point, hbar)));

      // closed form of the extended product vs g(Y_A, Y_B)
      const ScalarField qa = quadratic_field(
          rng.hermitian(n - 1), rng.complex_vector(n - 1, 1.0),
          rng.uniform(-1, 1), rng.uniform(-1, 1));
      const ScalarField qb = quadratic_field(
          rng.hermitian(n - 1), rng.complex_vector(n - 1, 1.0),
          rng.uniform(-1, 1), rng.uniform(-1, 1));
      const double viafields = g_ext(e, extended_gradient(qa, e, hbar),
                                     extended_gradient(qb, e, hbar), hbar);
      dual_route = std::max(
          dual_route, std::abs(viafields - extended_jordan(qa, qb, e, hbar)));
    }
    add("geometry", "J squared is minus identity", jsq, 1e-12);
    add("geometry", "phi squared is -I + eta (x) reeb", phisq, 1e-12);
    add("geometry", "g(reeb, .) = (2/hbar) eta", reeb_metric, 1e-12);
    add("geometry", "extended product reduces to metric bracket", reduction,
        1e-12);
    add("geometry", "extended product equals g(Y_A, Y_B)", dual_route, 1e-9);

    bool nondeg = true;
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::Index n = trial % 2 == 0 ? 2 : 3;
      nondeg = nondeg &&
               contact_nondegenerate(random_extended(rng, n, 2.0), 1.0);
    }
    add("geometry", "contact form nondegenerate (n=2,3)", nondeg ? 0.0 : 1.0,
        0.5);
  }

  // -- fields --------------------------------------------------------------
  if (want("fields")) {
    Rng rng(seed ^ 0x3);
    double defining = 0.0, eta_value = 0.0, motion_form = 0.0, jrel = 0.0,
           grad_def = 0.0, limit = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.uniform() * 3);
      const double hbar = rng.uniform(0.5, 2.0);
      HermitianOperator h{rng.hermitian(n)};
      const ExtendedState e = random_extended(rng, n, 1.2);
      const ScalarField eh = ScalarField::expectation(h);

      // omega(X_H, w) = d e_H (w) on projective directions
      const TangentVector x = hamiltonian_field(h, e.point, hbar);
      for (int k = 0; k < 3; ++k) {
        TangentVector w = random_tangent(rng, n);
        w.dS = 0.0;
        const double lhs = omega_fs(e.point, x, w, hbar);
        const double rhs = pair_d(eh.dz(e), 0.0, w);
        defining = std::max(defining, std::abs(lhs - rhs));
      }

      // contact conditions: eta(X) = -H and
      // omega(X, w) = dH(w) - f'(S) eta(w) for all w
      const double gamma = rng.uniform(0.0, 2.0);
      ContactHamiltonianSpec spec{h, LinearCoupling{gamma}, hbar};
      const TangentVector xc = contact_field(spec, e);
      const double hval = contact_hamiltonian_value(spec, e);
      eta_value = std::max(eta_value, std::abs(eta(e, xc, hbar) + hval));
      for (int k = 0; k < 3; ++k) {
        const TangentVector w = random_tangent(rng, n);
        const double lhs = omega_fs(e.point, xc, w, hbar);
        const double rhs =
            pair_d(eh.dz(e), coupling_slope(spec.fS, e.S), w) -
            coupling_slope(spec.fS, e.S) * eta(e, w, hbar);
        motion_form = std::max(motion_form, std::abs(lhs - rhs));
      }

      // J X = Y
      const TangentVector y = gradient_field(h, e.point, hbar);
      const TangentVector jx = j_fs(x);
      jrel = std::max(jrel, (jx.dz - y.dz).cwiseAbs().maxCoeff());

      // g(Y_A, w) = dA(w) for quadratic fields
      const ScalarField qa = quadratic_field(
          rng.hermitian(n - 1), rng.complex_vector(n - 1, 1.0),
          rng.uniform(-1, 1), rng.uniform(-1, 1));
      const TangentVector ya = extended_gradient(qa, e, hbar);
      for (int k = 0; k < 3; ++k) {
        const TangentVector w = random_tangent(rng, n);
        grad_def = std::max(
            grad_def, std::abs(g_ext(e, ya, w, hbar) -
                               pair_d(qa.dz(e), qa.dS(e), w)));
      }
    }
    // conservative limit: the generic contact field with gamma = 0 equals
    // the explicit Riccati field (moderate scales pin the rounding)
    Rng rng2(seed ^ 0x30);
    for (int trial = 0; trial < 200; ++trial) {
      const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng2.uniform() * 3);
      HermitianOperator h{rng2.hermitian(n)};
      const ExtendedState e = random_extended(rng2, n, 1.0);
      ContactHamiltonianSpec spec{h, LinearCoupling{0.0}, 1.0};
      const TangentVector a = contact_field(spec, e);
      const TangentVector b = hamiltonian_field(h, e.point, 1.0);
      limit = std::max(limit, (a.dz - b.dz).cwiseAbs().maxCoeff());
    }
    add("fields", "omega(X_H, .) = d e_H", defining, 1e-10);
    add("fields", "eta(X) = -H", eta_value, 1e-10);
    add("fields", "contact equations of motion (form residual)", motion_form,
        1e-10);
    add("fields", "J maps Hamiltonian field to gradient field", jrel, 1e-12);
    add("fields", "g(Y_A, .) = dA", grad_def, 1e-9);
    add("fields", "conservative limit matches Riccati field", limit, 1e-14);

    // d e_A/dt formula vs finite differences along integrated flows
    Rng rng3(seed ^ 0x31);
    double rate = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::Index n = trial % 2 == 0 ? 2 : 3;
      HermitianOperator h{rng3.hermitian(n)};
      HermitianOperator a{rng3.hermitian(n)};
      const double gamma = rng3.uniform(0.1, 1.5);
      ContactHamiltonianSpec spec{h, LinearCoupling{gamma}, 1.0};
      ExtendedState e0 = random_extended(rng3, n, 0.8);
      const double tp = 0.5, dt = 1e-4;
      StepControl ctrl;
      ctrl.abs_tol = ctrl.rel_tol = 1e-12;
      const Trajectory tr =
          integrate(spec, e0, 0.0, 1.0, {tp - dt, tp, tp + dt}, ctrl);
      const double fd = (expectation(a, tr.states[2].point) -
                         expectation(a, tr.states[0].point)) /
                        (2.0 * dt);
      rate = std::max(rate,
                      std::abs(fd - observable_rate(a, spec, tr.states[1])));
    }
    add("fields", "observable rate matches finite differences", rate, 1e-6);
  }

  // -- potential (dissipative-potential anticommutator identity) -----------
  if (want("potential")) {
    Rng rng(seed ^ 0x4);
    double residual = 0.0, hermit = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const Eigen::Index n = 2 + trial % 5;  // 2..6
      const ProjectiveState s = random_state(rng, n, 1.5);
      const Eigen::MatrixXcd abb = rng.hermitian(n - 1);
      residual = std::max(residual, anticommutator_identity_residual(abb, s));
      const DissipativePotential pot = dissipative_potential(abb, s);
      hermit = std::max(hermit,
                        (pot.assembled - pot.assembled.adjoint()).norm());
    }
    add("potential", "anticommutator identity (Frobenius)", residual, 1e-12);
    add("potential", "assembled potential Hermitian", hermit, 1e-12);
  }

  // -- master equation ------------------------------------------------------
  if (want("master")) {
    Rng rng(seed ^ 0x5);
    double equiv = 0.0, trace = 0.0, hermit = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
      const Eigen::Index n = 2 + trial % 4;  // 2..5
      const double hbar = rng.uniform(0.5, 2.0);
      HermitianOperator h{rng.hermitian(n)};
      const ExtendedState e = random_extended(rng, n, 1.5);
      const double gamma = rng.uniform(-1.5, 1.5);
      ContactHamiltonianSpec spec{h, LinearCoupling{gamma}, hbar};

      const Eigen::MatrixXcd raw = rho_dot_raw(spec, e);
      for (int j = 0; j < 2; ++j) {
        const Eigen::MatrixXcd abb = rng.hermitian(n - 1);
        equiv = std::max(equiv,
                         (raw - contact_master_rhs(spec, e, abb))
                             .cwiseAbs()
                             .maxCoeff());
      }
      trace = std::max(trace, std::abs(raw.trace()));
      hermit = std::max(hermit, (raw - raw.adjoint()).norm());

      // trace preservation holds for S-nonlinear couplings too
      GeneralCoupling gc{[](double s) { return 0.4 * s * s - 0.2 * s; },
                         [](double s) { return 0.8 * s - 0.2; }};
      ContactHamiltonianSpec spec2{h, gc, hbar};
      trace = std::max(trace, std::abs(rho_dot_raw(spec2, e).trace()));
    }
    add("master", "bracket form equals raw evolution (any Abb)", equiv, 1e-12);
    add("master", "trace of rho-dot vanishes", trace, 1e-13);
    add("master", "rho-dot Hermitian", hermit, 1e-12);

    // Scully-Lamb comparison: identical up to the nonlinear term
    Rng rng2(seed ^ 0x50);
    double sl = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const double hbar = rng2.uniform(0.5, 2.0);
      const double h1 = rng2.uniform(-2, 2), h2 = rng2.uniform(-2, 2);
      const Complex v = rng2.complex_in_disk(2.0);
      const double g1 = rng2.uniform(0.0, 2.0), g2 = rng2.uniform(0.0, 2.0);
      const double gamma = (g1 - g2) / hbar;
      const Complex z = rng2.complex_in_disk(2.0);
      const Complex contact = qubit_rhs(h1, h2, v, gamma, hbar, z);
      const Complex lamb = scully_lamb_z_rhs(h1, h2, v, g1, g2, z, hbar);
      sl = std::max(sl,
                    std::abs(contact - lamb + 0.5 * gamma * z * std::norm(z)));
    }
    add("master", "maser comparison differs by the nonlinear term", sl, 1e-14);
  }

  // -- decay oracle ----------------------------------------------------------
  if (want("decay")) {
    const double h1 = 4.0, h2 = 2.0, gamma = 1.0, kappa0 = 1e-3;
    ContactHamiltonianSpec spec{qubit_operator(h1, h2, 0.0),
                                LinearCoupling{gamma}, 1.0};
    ExtendedState e0{decay_initial_state(h1, h2, gamma, kappa0, 0.0), 0.0};
    StepControl ctrl;
    ctrl.abs_tol = 1e-14;
    ctrl.rel_tol = 1e-12;
    const auto ts = uniform_samples(0.0, 10.0, 401);
    const Trajectory tr = integrate(spec, e0, 0.0, 10.0, ts, ctrl);
    double dz = 0.0, de = 0.0, dp = 0.0, dv = 0.0;
    const HermitianOperator proj = excited_projector(2);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double t = ts[i];
      const ProjectiveState ref =
          decay_closed_form(h1, h2, gamma, kappa0, 0.0, t);
      const ProjectiveState got = tr.states[i].point.chart == 2
                                      ? tr.states[i].point
                                      : chart_transition(tr.states[i].point, 2);
      dz = std::max(dz,
                    std::abs(got.z[0] - ref.z[0]) / std::abs(ref.z[0]));
      de = std::max(de, std::abs(expectation(spec.H, got) -
                                 decay_energy(h1, h2, gamma, kappa0, t)));
      dp = std::max(dp,
                    std::abs(expectation(proj, got) -
                             decay_transition_probability(gamma, kappa0, t)));
      dv = std::max(dv, std::abs(variance(spec.H, got) -
                                 decay_energy_variance(h1, h2, gamma, kappa0,
                                                       t)));
    }
    add("decay", "z(t) matches the closed form (relative)", dz, 1e-8);
    add("decay", "e_H(t) matches the closed form", de, 1e-8);
    add("decay", "transition probability matches exp decay", dp, 1e-8);
    add("decay", "energy variance matches the closed form", dv, 1e-8);
  }

  // -- nonlinear lifts ---------------------------------------------------------
  if (want("lifts")) {
    Eigen::Vector2cd psi0(Complex(1, 0), Complex(1, 0));
    psi0 /= std::sqrt(2.0);
    const double dev1 =
        schrodinger_lift_deviation(1, 3.0, 3.0, Complex(1, 1), 1.0, 1.0, psi0,
                                   5.0);
    const double dev2 =
        schrodinger_lift_deviation(2, 3.0, 3.0, Complex(1, 1), 1.0, 1.0, psi0,
                                   5.0);
    add("lifts", "variant 1 projects onto the contact flow", dev1, 1e-6);
    add("lifts", "variant 2 projects onto the contact flow", dev2, 1e-6);
  }

  return checks;
}

inline bool all_pass(const std::vector<VerifyCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(),
                     [](const VerifyCheck& c) { return c.pass; });
}

}  // namespace cqd

#endif
