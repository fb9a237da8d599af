#ifndef CONTACTQD_MASTER_EQUATION_HPP
#define CONTACTQD_MASTER_EQUATION_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "contactqd/dynamics.hpp"
#include "contactqd/errors.hpp"
#include "contactqd/geometry.hpp"
#include "contactqd/operators.hpp"
#include "contactqd/state_space.hpp"

namespace cqd {

namespace detail {

// frame position -> original 0-based component index, pivot last
inline std::vector<Eigen::Index> frame_order(Eigen::Index n, int chart) {
  std::vector<Eigen::Index> ord;
  ord.reserve(n);
  for (int k = 1; k <= n; ++k)
    if (k != chart) ord.push_back(k - 1);
  ord.push_back(chart - 1);
  return ord;
}

inline Eigen::MatrixXcd frame_to_original(const Eigen::MatrixXcd& frame,
                                          int chart) {
  const Eigen::Index n = frame.rows();
  const auto ord = frame_order(n, chart);
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(ord[i], ord[j]) = frame(i, j);
  return m;
}

// Block matrix (1/(1+q)) [[z z^dag, z(1-q)/2],[z^dag (1-q)/2, -q]] in the
// chart frame: the closed form of the anticommutator [rho, A(z)]_+.
inline Eigen::MatrixXcd anticommutator_closed_form_frame(
    const Eigen::VectorXcd& z) {
  const Eigen::Index m = z.size();
  const double q = z.squaredNorm();
  const double d = 1.0 + q;
  Eigen::MatrixXcd out(m + 1, m + 1);
  out.topLeftCorner(m, m) = z * z.adjoint();
  out.topRightCorner(m, 1) = 0.5 * (1.0 - q) * z;
  out.bottomLeftCorner(1, m) = 0.5 * (1.0 - q) * z.adjoint();
  out(m, m) = -q;
  return out / d;
}

}  // namespace detail

/// The Hermitian dissipative potential A(z): free block `abb`, derived
/// column `w`, derived scalar `a`, and the assembled n x n matrix in the
/// original basis. The anticommutator [rho, A(z)]_+ is independent of the
/// choice of Hermitian `abb`.
struct DissipativePotential {
  Eigen::MatrixXcd abb;
  Eigen::VectorXcd w;
  double a = 0.0;
  Eigen::MatrixXcd assembled;
};

/// w(z) = (I - z z^dag/(1+q)) ((1+q)/2 I - (z^dag Abb z) I - Abb) z,
/// a(z) = z^dag Abb z - q, with q = |z|^2.
inline DissipativePotential dissipative_potential(const Eigen::MatrixXcd& abb,
                                                  const ProjectiveState& s) {
  const Eigen::Index m = s.z.size();
  if (abb.rows() != m || abb.cols() != m)
    throw DimensionMismatch("dissipative-potential block must be (n-1)^2");
  double scale = std::max(abb.cwiseAbs().maxCoeff(), 1.0);
  if ((abb - abb.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw Error("dissipative-potential block must be Hermitian");

  const Eigen::VectorXcd& z = s.z;
  const double q = z.squaredNorm();
  const double d = 1.0 + q;
  const double zaz = (z.adjoint() * abb * z)(0).real();

  DissipativePotential pot;
  pot.abb = abb;
  Eigen::VectorXcd inner = (0.5 * d - zaz) * z - abb * z;
  pot.w = inner - z * (z.dot(inner) / d);
  pot.a = zaz - q;

  Eigen::MatrixXcd frame(m + 1, m + 1);
  frame.topLeftCorner(m, m) = abb;
  frame.topRightCorner(m, 1) = pot.w;
  frame.bottomLeftCorner(1, m) = pot.w.adjoint();
  frame(m, m) = pot.a;
  pot.assembled = detail::frame_to_original(frame, s.chart);
  return pot;
}

/// Frobenius residual between the matrix anticommutator [rho, A(z)]_+ and
/// its closed block form; must vanish for every Hermitian abb.
inline double anticommutator_identity_residual(const Eigen::MatrixXcd& abb,
                                               const ProjectiveState& s) {
  const DissipativePotential pot = dissipative_potential(abb, s);
  const DensityMatrix rho = density_matrix(s);
  const Eigen::MatrixXcd lhs = rho * pot.assembled + pot.assembled * rho;
  const Eigen::MatrixXcd rhs = detail::frame_to_original(
      detail::anticommutator_closed_form_frame(s.z), s.chart);
  return (lhs - rhs).norm();
}

/// Equation of motion for the projector rho along the contact flow, from the
/// chain rule on the block form of rho (no dissipative potential involved).
/// Trace-free for any coupling, including S-nonlinear ones. Returned in the
/// original basis.
inline Eigen::MatrixXcd rho_dot_raw(const ContactHamiltonianSpec& spec,
                                    const ExtendedState& e) {
  const int r = spec.ref_chart();
  ExtendedState ref = e;
  if (e.point.chart != r) ref.point = chart_transition(e.point, r);

  const ScalarField eH = ScalarField::expectation(spec.H);
  const Eigen::VectorXcd dH = eH.dz(ref);
  const Eigen::VectorXcd& z = ref.point.z;
  const Eigen::Index m = z.size();
  const Complex alpha = detail::z_times(z, dH);
  const Complex ih = Complex(0, 1) / spec.hbar;

  Eigen::MatrixXcd frame(m + 1, m + 1);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index k = 0; k < m; ++k)
      frame(j, k) = ih * (z[j] * dH[k] - std::conj(z[k]) * std::conj(dH[j]));
    frame(j, m) = ih * (-std::conj(dH[j]) - z[j] * alpha);
    frame(m, j) = ih * (dH[j] + std::conj(z[j]) * std::conj(alpha));
  }
  frame(m, m) = ih * (std::conj(alpha) - alpha);

  const double fp = coupling_slope(spec.fS, e.S);
  if (fp != 0.0)
    frame += fp * detail::anticommutator_closed_form_frame(z);
  return detail::frame_to_original(frame, r);
}

/// Contact master equation (i/hbar)[rho, H] + f'(S) [rho, A(z)]_+ for a
/// coupling linear in S; equals rho_dot_raw for every Hermitian abb.
inline Eigen::MatrixXcd contact_master_rhs(const ContactHamiltonianSpec& spec,
                                           const ExtendedState& e,
                                           const Eigen::MatrixXcd& abb) {
  if (!coupling_is_linear(spec.fS))
    throw NonMarkovian(
        "the density-operator form is exposed only for couplings linear in S");
  const int r = spec.ref_chart();
  ProjectiveState sref =
      e.point.chart == r ? e.point : chart_transition(e.point, r);

  const DensityMatrix rho = density_matrix(sref);
  const Eigen::MatrixXcd& h = spec.H.matrix();
  Eigen::MatrixXcd out = (Complex(0, 1) / spec.hbar) * (rho * h - h * rho);
  const double fp = coupling_slope(spec.fS, e.S);
  if (fp != 0.0) {
    const DissipativePotential pot = dissipative_potential(abb, sref);
    out += fp * (rho * pot.assembled + pot.assembled * rho);
  }
  return out;
}

inline Eigen::MatrixXcd contact_master_rhs(const ContactHamiltonianSpec& spec,
                                           const ExtendedState& e) {
  const Eigen::Index m = e.point.z.size();
  return contact_master_rhs(spec, e, Eigen::MatrixXcd::Zero(m, m));
}

// ---------------------------------------------------------------------------
// Comparators

/// Projective form of the Scully-Lamb (optical maser) qubit equation
///   rho' = (i/hbar)[rho, H] - (1/(2 hbar))[rho, Gamma]_+,
/// Gamma = diag(gamma1, gamma2):
///   z' = (i/hbar)(conj(V) z^2 - (H1-H2) z - V) - ((gamma1-gamma2)/(2 hbar)) z.
/// Differs from the contact flow exactly by the nonlinear term
/// -(gamma/2) z |z|^2 with gamma = (gamma1-gamma2)/hbar.
inline Complex scully_lamb_z_rhs(double h1, double h2, Complex v,
                                 double gamma1, double gamma2, Complex z,
                                 double hbar = 1.0) {
  const Complex riccati = (Complex(0, 1) / hbar) *
                          (std::conj(v) * z * z - (h1 - h2) * z - v);
  return riccati - (gamma1 - gamma2) / (2.0 * hbar) * z;
}

/// Tr(rho') of the Scully-Lamb equation for the normalized state at z;
/// strictly negative for positive Gamma (the evolution leaks trace).
inline double scully_lamb_trace_rate(double gamma1, double gamma2, Complex z,
                                     double hbar = 1.0) {
  const double q = std::norm(z);
  return -(gamma1 * q + gamma2) / (hbar * (1.0 + q));
}

/// The two nonlinear 2x2 Schroedinger-type lifts of the dissipative qubit
/// flow. Both reproduce the contact z-equation after projection; neither
/// preserves the norm or the phase of psi.
///   variant 1: psi' = -(i/hbar) H psi - (gamma/2) [[1, z],[-conj(z), 1]] psi
///   variant 2: psi' = -(i/hbar) H psi + (gamma/2) [[-1/2, 0],[conj(z), 1/2]] psi
/// with z = psi^1/psi^2.
inline Eigen::Vector2cd schrodinger_lift_rhs(int variant,
                                             const Eigen::MatrixXcd& h,
                                             double gamma, double hbar,
                                             const Eigen::Vector2cd& psi) {
  if (std::abs(psi[1]) < kChartThreshold * psi.norm())
    throw ChartSingular("psi^2 crossed zero during the lift evolution");
  const Complex z = psi[0] / psi[1];
  Eigen::Vector2cd out = (-Complex(0, 1) / hbar) * (h * psi);
  Eigen::Matrix2cd g;
  if (variant == 1) {
    g << 1.0, z, -std::conj(z), 1.0;
    out -= 0.5 * gamma * (g * psi);
  } else if (variant == 2) {
    g << -0.5, 0.0, std::conj(z), 0.5;
    out += 0.5 * gamma * (g * psi);
  } else {
    throw DomainError("lift variant must be 1 or 2");
  }
  return out;
}

/// Integrates the chosen lift and the contact flow from the same initial
/// state and returns max_t |z_lift(t) - z_contact(t)| over the sample grid.
inline double schrodinger_lift_deviation(int variant, double h1, double h2,
                                         Complex v, double gamma, double hbar,
                                         const Eigen::Vector2cd& psi0,
                                         double t_end, int samples = 201) {
  const HermitianOperator hop = qubit_operator(h1, h2, v);
  const Eigen::MatrixXcd h = hop.matrix();

  auto rhs = [&](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    Eigen::Vector2cd psi(Complex(y[0], y[1]), Complex(y[2], y[3]));
    Eigen::Vector2cd d = schrodinger_lift_rhs(variant, h, gamma, hbar, psi);
    dy.resize(4);
    dy << d[0].real(), d[0].imag(), d[1].real(), d[1].imag();
  };

  Eigen::VectorXd y0(4);
  y0 << psi0[0].real(), psi0[0].imag(), psi0[1].real(), psi0[1].imag();

  ContactHamiltonianSpec spec{hop, LinearCoupling{gamma}, hbar};
  ExtendedState e0{project(psi0, 2), 0.0};
  const std::vector<double> ts = uniform_samples(0.0, t_end, samples);
  StepControl ctrl;
  ctrl.abs_tol = ctrl.rel_tol = 1e-12;
  const Trajectory contact = integrate(spec, e0, 0.0, t_end, ts, ctrl);

  Rk45Options opt;
  opt.abs_tol = opt.rel_tol = 1e-12;
  Rk45Stepper stepper(rhs, 0.0, y0, opt, t_end);
  double dev = 0.0;
  std::size_t i = 0;
  auto compare_at = [&](double t, const Eigen::VectorXd& y) {
    Eigen::Vector2cd psi(Complex(y[0], y[1]), Complex(y[2], y[3]));
    const ProjectiveState lifted = project(psi, 2);
    const ProjectiveState ref =
        contact.states[i].point.chart == 2
            ? contact.states[i].point
            : chart_transition(contact.states[i].point, 2);
    dev = std::max(dev, std::abs(lifted.z[0] - ref.z[0]));
    (void)t;
  };
  compare_at(ts[0], y0);
  ++i;
  Rk45DenseStep dense;
  while (!stepper.done()) {
    stepper.step(dense);
    while (i < ts.size() && ts[i] <= stepper.t()) {
      compare_at(ts[i], dense.eval(ts[i]));
      ++i;
    }
  }
  return dev;
}

}  // namespace cqd

#endif
