#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "contactqd/analysis.hpp"
#include "contactqd/master_equation.hpp"
#include "contactqd/rng.hpp"

using cqd::Complex;
using Catch::Approx;

namespace {

cqd::ProjectiveState qubit_state(Complex z) {
  cqd::ProjectiveState s;
  s.chart = 2;
  s.z.resize(1);
  s.z[0] = z;
  return s;
}

cqd::ProjectiveState random_state(cqd::Rng& rng, Eigen::Index n,
                                  double radius) {
  cqd::ProjectiveState s;
  s.chart = static_cast<int>(n);
  s.z = rng.complex_vector(n - 1, radius);
  return s;
}

}  // namespace

TEST_CASE("dissipative potential blocks") {
  // z = 0: every derived block vanishes
  cqd::ProjectiveState origin;
  origin.chart = 3;
  origin.z = Eigen::VectorXcd::Zero(2);
  Eigen::MatrixXcd abb = Eigen::MatrixXcd::Zero(2, 2);
  abb << 0.5, Complex(0.1, 0.2), Complex(0.1, -0.2), -0.3;
  auto pot = cqd::dissipative_potential(abb, origin);
  CHECK(pot.w.norm() == 0.0);
  CHECK(pot.a == 0.0);
  CHECK((pot.assembled.topLeftCorner(2, 2) - abb).norm() < 1e-15);
  CHECK(std::abs(pot.assembled(2, 2)) == 0.0);

  // scalar reduction at n = 2, Abb = 0, z = 1: w = 1/2, a = -1
  pot = cqd::dissipative_potential(Eigen::MatrixXcd::Zero(1, 1),
                                   qubit_state(1.0));
  CHECK(pot.w[0].real() == Approx(0.5));
  CHECK(pot.w[0].imag() == Approx(0.0).margin(1e-16));
  CHECK(pot.a == Approx(-1.0));

  // assembled matrix is Hermitian for random blocks and states
  cqd::Rng rng(89);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index n = 2 + trial % 5;  // n <= 6
    const auto s = random_state(rng, n, 1.5);
    const auto p = cqd::dissipative_potential(rng.hermitian(n - 1), s);
    REQUIRE((p.assembled - p.assembled.adjoint()).norm() < 1e-12);
  }

  CHECK_THROWS_AS(
      cqd::dissipative_potential(Eigen::MatrixXcd::Zero(2, 2), qubit_state(1.0)),
      cqd::DimensionMismatch);
}

TEST_CASE("anticommutator identity") {
  // n = 2, Abb = 0, z = 1: both routes give diag(1/2, -1/2)
  {
    const auto s = qubit_state(1.0);
    const auto pot =
        cqd::dissipative_potential(Eigen::MatrixXcd::Zero(1, 1), s);
    const auto rho = cqd::density_matrix(s);
    const Eigen::MatrixXcd anti = rho * pot.assembled + pot.assembled * rho;
    CHECK(std::abs(anti(0, 0) - 0.5) < 1e-15);
    CHECK(std::abs(anti(1, 1) + 0.5) < 1e-15);
    CHECK(std::abs(anti(0, 1)) < 1e-15);
  }

  // z = 0: both sides vanish
  {
    cqd::ProjectiveState origin;
    origin.chart = 2;
    origin.z = Eigen::VectorXcd::Zero(1);
    CHECK(cqd::anticommutator_identity_residual(Eigen::MatrixXcd::Zero(1, 1),
                                                origin) < 1e-15);
  }

  // the identity holds for any Hermitian free block
  cqd::Rng rng(97);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index n = 2 + trial % 5;
    const auto s = random_state(rng, n, 1.5);
    worst = std::max(worst, cqd::anticommutator_identity_residual(
                                rng.hermitian(n - 1), s));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("raw density evolution") {
  // a diagonal Hamiltonian holds its eigenstates fixed
  const auto H = cqd::qubit_operator(4.0, 2.0, 0.0);
  cqd::ContactHamiltonianSpec cons{H, std::monostate{}, 1.0};
  cqd::ProjectiveState basis;
  basis.chart = 2;
  basis.z = Eigen::VectorXcd::Zero(1);
  CHECK(cqd::rho_dot_raw(cons, {basis, 0.0}).norm() < 1e-15);

  cqd::Rng rng(101);
  double trace = 0.0, hermit = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::Index n = 2 + trial % 4;
    cqd::HermitianOperator h{rng.hermitian(n)};
    cqd::ExtendedState e{random_state(rng, n, 1.5), rng.uniform(-1, 1)};
    // alternate linear and S-nonlinear couplings
    cqd::ContactHamiltonianSpec spec =
        trial % 2 == 0
            ? cqd::ContactHamiltonianSpec{h,
                                          cqd::LinearCoupling{rng.uniform(-2, 2)},
                                          1.0}
            : cqd::ContactHamiltonianSpec{
                  h,
                  cqd::GeneralCoupling{
                      [](double s) { return 0.4 * s * s - 0.2 * s; },
                      [](double s) { return 0.8 * s - 0.2; }},
                  1.0};
    const auto rdot = cqd::rho_dot_raw(spec, e);
    trace = std::max(trace, std::abs(rdot.trace()));
    hermit = std::max(hermit, (rdot - rdot.adjoint()).norm());
  }
  CHECK(trace < 1e-13);
  CHECK(hermit < 1e-13);
}

TEST_CASE("raw evolution matches finite differences of the projector") {
  cqd::Rng rng(103);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = 2 + trial % 3;
    cqd::HermitianOperator h{rng.hermitian(n)};
    cqd::ContactHamiltonianSpec spec{
        h, cqd::LinearCoupling{rng.uniform(0.1, 1.0)}, 1.0};
    cqd::ExtendedState e0{random_state(rng, n, 0.8), 0.0};
    cqd::StepControl ctrl;
    ctrl.abs_tol = ctrl.rel_tol = 1e-12;
    const double tp = 0.3, dt = 1e-4;
    const auto tr =
        cqd::integrate(spec, e0, 0.0, 0.6, {tp - dt, tp, tp + dt}, ctrl);
    const Eigen::MatrixXcd fd =
        (cqd::density_matrix(tr.states[2].point) -
         cqd::density_matrix(tr.states[0].point)) /
        (2 * dt);
    const auto rdot = cqd::rho_dot_raw(spec, tr.states[1]);
    REQUIRE((fd - rdot).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("contact master equation") {
  cqd::Rng rng(107);

  // equals the raw evolution for any Hermitian free block
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 2 + trial % 4;
    const double hbar = rng.uniform(0.5, 2.0);
    cqd::HermitianOperator h{rng.hermitian(n)};
    cqd::ExtendedState e{random_state(rng, n, 1.5), rng.uniform(-1, 1)};
    cqd::ContactHamiltonianSpec spec{
        h, cqd::LinearCoupling{rng.uniform(-2, 2)}, hbar};
    const auto raw = cqd::rho_dot_raw(spec, e);
    for (int k = 0; k < 2; ++k) {
      const auto rhs = cqd::contact_master_rhs(spec, e, rng.hermitian(n - 1));
      worst = std::max(worst, (raw - rhs).cwiseAbs().maxCoeff());
    }
  }
  CHECK(worst < 1e-12);

  // gamma = 0 leaves the commutator term only
  cqd::HermitianOperator h{rng.hermitian(3)};
  cqd::ContactHamiltonianSpec cons{h, cqd::LinearCoupling{0.0}, 1.0};
  const cqd::ExtendedState e{random_state(rng, 3, 1.0), 0.3};
  const auto rho = cqd::density_matrix(e.point);
  const Eigen::MatrixXcd vn =
      Complex(0, 1) * (rho * h.matrix() - h.matrix() * rho);
  CHECK((cqd::contact_master_rhs(cons, e) - vn).cwiseAbs().maxCoeff() < 1e-13);

  // S-nonlinear couplings are refused
  cqd::ContactHamiltonianSpec gen{
      h,
      cqd::GeneralCoupling{[](double s) { return s * s; },
                           [](double s) { return 2 * s; }},
      1.0};
  CHECK_THROWS_AS(cqd::contact_master_rhs(gen, e), cqd::NonMarkovian);
}

TEST_CASE("maser comparison") {
  const double h1 = 3.0, h2 = 1.0;
  const Complex v(1, 1);

  // at z = 0 the nonlinear term vanishes: both right-hand sides agree
  {
    const double g1 = 0.8, g2 = 0.2, hbar = 1.0;
    const double gamma = (g1 - g2) / hbar;
    const Complex contact = cqd::qubit_rhs(h1, h2, v, gamma, hbar, 0.0);
    const Complex lamb = cqd::scully_lamb_z_rhs(h1, h2, v, g1, g2, 0.0, hbar);
    CHECK(std::abs(contact - lamb) < 1e-15);
  }

  // equal relaxation rates reduce to the conservative flow
  {
    const Complex z(0.4, -0.7);
    const Complex lamb = cqd::scully_lamb_z_rhs(h1, h2, v, 0.9, 0.9, z);
    const Complex riccati = cqd::qubit_rhs(h1, h2, v, 0.0, 1.0, z);
    CHECK(std::abs(lamb - riccati) < 1e-15);
  }

  // contact_RHS - maser_RHS = -(gamma/2) z |z|^2 identically
  cqd::Rng rng(109);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const double hbar = rng.uniform(0.5, 2.0);
    const double g1 = rng.uniform(0, 2), g2 = rng.uniform(0, 2);
    const double gamma = (g1 - g2) / hbar;
    const Complex z = rng.complex_in_disk(2.5);
    const Complex diff = cqd::qubit_rhs(h1, h2, v, gamma, hbar, z) -
                         cqd::scully_lamb_z_rhs(h1, h2, v, g1, g2, z, hbar);
    worst = std::max(worst, std::abs(diff + 0.5 * gamma * z * std::norm(z)));
  }
  CHECK(worst < 1e-14);

  // positive relaxation rates leak trace
  CHECK(cqd::scully_lamb_trace_rate(0.5, 0.2, Complex(0.3, 0.4)) < 0.0);
  CHECK(cqd::scully_lamb_trace_rate(1.0, 1.0, Complex(2.0, 0.0)) < 0.0);
}

TEST_CASE("nonlinear lifts project onto the contact flow") {
  Eigen::Vector2cd psi0(Complex(1, 0), Complex(1, 0));
  psi0 /= std::sqrt(2.0);

  // gamma = 0: both variants are the linear equation; projection follows
  // the conservative flow (bounded orbit: e_H away from the H1 level,
  // whose orbit runs through the chart boundary)
  Eigen::Vector2cd psi_b(Complex(0.6, 0), Complex(0.8, 0));
  CHECK(cqd::schrodinger_lift_deviation(1, 3.0, 1.0, Complex(1, 1), 0.0, 1.0,
                                        psi_b, 3.0) < 1e-7);
  CHECK(cqd::schrodinger_lift_deviation(2, 3.0, 1.0, Complex(1, 1), 0.0, 1.0,
                                        psi_b, 3.0) < 1e-7);

  // dissipative scenario
  CHECK(cqd::schrodinger_lift_deviation(1, 3.0, 3.0, Complex(1, 1), 1.0, 1.0,
                                        psi0, 5.0) < 1e-6);
  CHECK(cqd::schrodinger_lift_deviation(2, 3.0, 3.0, Complex(1, 1), 1.0, 1.0,
                                        psi0, 5.0) < 1e-6);

  CHECK_THROWS_AS(cqd::schrodinger_lift_deviation(3, 3.0, 3.0, Complex(1, 1),
                                                  1.0, 1.0, psi0, 1.0),
                  cqd::DomainError);
}

TEST_CASE("purity and trace hold along the master-equation flow") {
  // the decay scenario, driven as a trajectory and checked as projectors
  const double gamma = 1.0;
  const auto H = cqd::qubit_operator(4.0, 2.0, 0.0);
  cqd::ContactHamiltonianSpec spec{H, cqd::LinearCoupling{gamma}, 1.0};
  cqd::ExtendedState e0{cqd::decay_initial_state(4.0, 2.0, gamma, 0.05, 0.0),
                        0.0};
  const auto ts = cqd::uniform_samples(0.0, 8.0, 161);
  const auto tr = cqd::integrate(spec, e0, 0.0, 8.0, ts);
  for (const auto& st : tr.states) {
    const auto rho = cqd::density_matrix(st.point);
    REQUIRE(std::abs(rho.trace() - 1.0) < 1e-9);
    REQUIRE((rho * rho - rho).norm() < 1e-8);
  }
}
