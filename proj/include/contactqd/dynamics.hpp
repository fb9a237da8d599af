#ifndef CONTACTQD_DYNAMICS_HPP
#define CONTACTQD_DYNAMICS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "contactqd/errors.hpp"
#include "contactqd/geometry.hpp"
#include "contactqd/operators.hpp"
#include "contactqd/rk45.hpp"
#include "contactqd/state_space.hpp"

namespace cqd {

/// Coupling term f(S) of the contact Hamiltonian H = e_H + f(S).
struct LinearCoupling {
  double gamma = 0.0;  // f(S) = -gamma S
};

struct GeneralCoupling {
  std::function<double(double)> f;
  std::function<double(double)> dfdS;
};

using Coupling = std::variant<std::monostate, LinearCoupling, GeneralCoupling>;

inline double coupling_value(const Coupling& c, double S) {
  if (std::holds_alternative<LinearCoupling>(c))
    return -std::get<LinearCoupling>(c).gamma * S;
  if (std::holds_alternative<GeneralCoupling>(c))
    return std::get<GeneralCoupling>(c).f(S);
  return 0.0;
}

inline double coupling_slope(const Coupling& c, double S) {
  if (std::holds_alternative<LinearCoupling>(c))
    return -std::get<LinearCoupling>(c).gamma;
  if (std::holds_alternative<GeneralCoupling>(c))
    return std::get<GeneralCoupling>(c).dfdS(S);
  return 0.0;
}

inline bool coupling_is_linear(const Coupling& c) {
  return !std::holds_alternative<GeneralCoupling>(c);
}

/// Contact Hamiltonian H = e_H + f(S) of a reference Hamiltonian H plus a
/// coupling to the environment through the fiber coordinate.
struct ContactHamiltonianSpec {
  HermitianOperator H;
  Coupling fS;
  double hbar = 1.0;
  // Chart whose contactification defines the dynamics. The flow is one fixed
  // system; other charts only re-express it (see contact_field_in_chart).
  int reference_chart = 0;  // 0 = last component

  int ref_chart() const {
    return reference_chart > 0 ? reference_chart : static_cast<int>(H.dim());
  }
};

inline double expectation(const HermitianOperator& a,
                          const ProjectiveState& s) {
  return ScalarField::expectation_value(a, s);
}

/// Variance sigma^2_A = e_{A^2} - e_A^2 (matrix route; the metric-bracket
/// route is -(hbar/2) jordan(eA,eA) and must agree).
inline double variance(const HermitianOperator& a, const ProjectiveState& s) {
  HermitianOperator a2(a.matrix() * a.matrix());
  double ea = expectation(a, s);
  return expectation(a2, s) - ea * ea;
}

inline double contact_hamiltonian_value(const ContactHamiltonianSpec& spec,
                                        const ExtendedState& e) {
  return expectation(spec.H, e.point) + coupling_value(spec.fS, e.S);
}

/// Hamiltonian vector field in the state's own chart (explicit Riccati
/// polynomial): X_z^k = (i/hbar)(z^k (v^dag z) - (H1 z)_k + h2 z^k - v_k).
inline TangentVector hamiltonian_field(const HermitianOperator& h,
                                       const ProjectiveState& s,
                                       double hbar = 1.0) {
  if (h.dim() != s.dim())
    throw DimensionMismatch("operator/state dimensions differ");
  const auto b = h.blocks(s.chart);
  const Eigen::VectorXcd& z = s.z;
  const Complex vz = b.v.dot(z);  // v^dag z
  Eigen::VectorXcd dz =
      (Complex(0, 1) / hbar) *
      (vz * z - (b.h1 * z).eval() + b.h2 * z - b.v).eval();
  return {std::move(dz), 0.0};
}

/// Gradient vector field of e_H in explicit form,
/// Y_z^k = (1/hbar)(z^k (v^dag z) - (H1 z)_k + h2 z^k - v_k);
/// coincides with the complex-structure image J(X) of the Hamiltonian field.
inline TangentVector gradient_field(const HermitianOperator& h,
                                    const ProjectiveState& s,
                                    double hbar = 1.0) {
  if (h.dim() != s.dim())
    throw DimensionMismatch("operator/state dimensions differ");
  const auto b = h.blocks(s.chart);
  const Eigen::VectorXcd& z = s.z;
  const Complex vz = b.v.dot(z);
  Eigen::VectorXcd dz =
      (1.0 / hbar) * (vz * z - (b.h1 * z).eval() + b.h2 * z - b.v).eval();
  return {std::move(dz), 0.0};
}

/// Contact Hamiltonian vector field of an arbitrary function on the
/// extension, from its derivatives (the generic equations of motion):
///   X_z^k = -(i/hbar)(1+q)(dA/dzbar_k + z^k zbar.dAbar) + (z^k/2)(1+q) dA/dS
///   X_S   = -A - (1+q) Re(z.dA)
inline TangentVector contact_field(const ScalarField& a,
                                   const ExtendedState& e, double hbar = 1.0) {
  const Eigen::VectorXcd& z = e.point.z;
  const double d = 1.0 + z.squaredNorm();
  const Eigen::VectorXcd da = a.dz(e);
  const Complex alpha = detail::z_times(z, da);
  const double sa = a.dS(e);

  TangentVector out;
  out.dz = (-Complex(0, 1) / hbar * d) *
               (da.conjugate() + std::conj(alpha) * z).eval() +
           (0.5 * d * sa) * z;
  out.dS = -a.value(e) - d * alpha.real();
  return out;
}

/// The same for a ContactHamiltonianSpec's H = e_H + f(S); the state must
/// be held in the reference chart.
inline TangentVector contact_field(const ContactHamiltonianSpec& spec,
                                   const ExtendedState& e) {
  const ScalarField eH = ScalarField::expectation(spec.H);
  const Eigen::VectorXcd& z = e.point.z;
  const double d = 1.0 + z.squaredNorm();
  const double hbar = spec.hbar;
  const Eigen::VectorXcd dH = eH.dz(e);
  const Complex alpha = detail::z_times(z, dH);  // z^k dH/dz^k
  const double fp = coupling_slope(spec.fS, e.S);

  TangentVector out;
  out.dz = (-Complex(0, 1) / hbar * d) *
               (dH.conjugate() + std::conj(alpha) * z).eval() +
           (0.5 * d * fp) * z;
  const double hval = eH.value(e) + coupling_value(spec.fS, e.S);
  out.dS = -hval - d * alpha.real();
  return out;
}

/// Extended gradient field of a general function on the contact extension;
/// satisfies g_ext(Y_A, .) = dA.
inline TangentVector extended_gradient(const ScalarField& a,
                                       const ExtendedState& e,
                                       double hbar = 1.0) {
  const Eigen::VectorXcd& z = e.point.z;
  const double q = z.squaredNorm();
  const double d = 1.0 + q;
  const Eigen::VectorXcd da = a.dz(e);
  const Complex alpha = detail::z_times(z, da);
  const double sa = a.dS(e);

  TangentVector out;
  out.dz = (-d / hbar) * (da.conjugate() + std::conj(alpha) * z).eval() +
           (0.5 * d * sa) * (-Complex(0, 1)) * z;
  out.dS = d * alpha.imag() + 0.5 * hbar * (1.0 - q) * sa;
  return out;
}

/// d e_A / dt along the contact flow:
/// {e_A, e_H}_omega + (1/2)(1+|z|^2)(z.dA + zbar.dAbar) f'(S).
inline double observable_rate(const HermitianOperator& a,
                              const ContactHamiltonianSpec& spec,
                              const ExtendedState& e) {
  const ScalarField ea = ScalarField::expectation(a);
  const ScalarField eh = ScalarField::expectation(spec.H);
  const double pb = poisson(ea, eh, e.point, spec.hbar);
  const Eigen::VectorXcd da = ea.dz(e);
  const Complex alpha = detail::z_times(e.point.z, da);
  const double d = 1.0 + e.point.z.squaredNorm();
  return pb + d * alpha.real() * coupling_slope(spec.fS, e.S);
}

// ---------------------------------------------------------------------------
// Flow integration

struct ChartSwitchEvent {
  double t = 0.0;
  int from = 0, to = 0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<ExtendedState> states;
  std::vector<ChartSwitchEvent> chart_switch_events;
};

struct StepControl {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double chart_switch_radius = 10.0;
  long max_steps = 2'000'000;
};

/// Integration could not be continued; carries the last good state.
struct StepFailure : Error {
  StepFailure(const std::string& what, double t, ExtendedState last)
      : Error(what), t_reached(t), last_state(std::move(last)) {}
  double t_reached;
  ExtendedState last_state;
};

namespace detail {

// Real packing of ((n-1) complex coords, S).
inline Eigen::VectorXd pack(const Eigen::VectorXcd& z, double S) {
  const Eigen::Index m = z.size();
  Eigen::VectorXd y(2 * m + 1);
  for (Eigen::Index k = 0; k < m; ++k) {
    y[2 * k] = z[k].real();
    y[2 * k + 1] = z[k].imag();
  }
  y[2 * m] = S;
  return y;
}

inline void unpack(const Eigen::VectorXd& y, Eigen::VectorXcd& z, double& S) {
  const Eigen::Index m = (y.size() - 1) / 2;
  z.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) z[k] = {y[2 * k], y[2 * k + 1]};
  S = y[y.size() - 1];
}

}  // namespace detail

/// Right-hand side of the contact flow for a state held in an arbitrary
/// chart. The dynamics is the one system defined by the reference-chart
/// contactification; in other charts the Hamiltonian part is the (chart-
/// covariant) Riccati field of the reordered operator, while the coupling
/// term pushes only the reference-pivot coordinate:
///   dw^r/dt = -(f'(S)/2) (1+|w|^2) w^r / |w^r|^2.
/// S evolves by the reference-chart expression throughout.
inline TangentVector contact_field_in_chart(const ContactHamiltonianSpec& spec,
                                            const ExtendedState& e) {
  const int r = spec.ref_chart();
  const int c = e.point.chart;
  const double hbar = spec.hbar;
  const double fp = coupling_slope(spec.fS, e.S);

  TangentVector out = hamiltonian_field(spec.H, e.point, hbar);
  const Eigen::VectorXcd& w = e.point.z;
  const double d = 1.0 + w.squaredNorm();

  if (c == r) {
    out.dz += (0.5 * d * fp) * w;
  } else if (fp != 0.0) {
    const Eigen::Index rs = detail::slot(r, c);
    const Complex wr = w[rs];
    const double wr2 = std::norm(wr);
    if (wr2 == 0.0)
      throw ChartSingular(
          "state sits on the singular locus of the reference chart; the "
          "coupling field is undefined there");
    out.dz[rs] += -(0.5 * fp) * d / wr2 * wr;
  }

  // dS/dt = -H - (1/2)(1+|z|^2)(z.dH + zbar.dHbar) in reference coordinates
  ExtendedState ref = e;
  if (c != r) ref.point = chart_transition(e.point, r);
  const ScalarField eH = ScalarField::expectation(spec.H);
  const Complex alpha = detail::z_times(ref.point.z, eH.dz(ref));
  const double dref = 1.0 + ref.point.z.squaredNorm();
  const double hval = eH.value(ref) + coupling_value(spec.fS, e.S);
  out.dS = -hval - dref * alpha.real();
  return out;
}

/// Adaptive flow of the contact system with dense output at the requested
/// sample times and automatic chart switching when |z| leaves the ball of
/// radius StepControl::chart_switch_radius.
inline Trajectory integrate(const ContactHamiltonianSpec& spec,
                            const ExtendedState& e0, double t0, double t1,
                            const std::vector<double>& sample_times,
                            const StepControl& ctrl = {}) {
  if (!(t1 > t0)) throw DomainError("integration span must be forward");
  if (spec.H.dim() != e0.point.dim())
    throw DimensionMismatch("operator/state dimensions differ");
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    if (sample_times[i] < t0 || sample_times[i] > t1)
      throw DomainError("sample time outside the integration span");
    if (i > 0 && sample_times[i] <= sample_times[i - 1])
      throw DomainError("sample times must be strictly increasing");
  }

  Trajectory traj;
  traj.times = sample_times;
  traj.states.reserve(sample_times.size());

  ExtendedState cur = e0;
  double t_cur = t0;
  const double r2 = ctrl.chart_switch_radius * ctrl.chart_switch_radius;

  // Re-express in the best chart; returns true if the chart changed.
  auto maybe_switch = [&](double t) {
    if (cur.point.z.squaredNorm() <= r2) return false;
    Eigen::VectorXcd psi = homogeneous(cur.point);
    int best = auto_chart(psi);
    if (best == cur.point.chart) return false;
    traj.chart_switch_events.push_back({t, cur.point.chart, best});
    cur.point = project(psi, best);
    return true;
  };
  maybe_switch(t0);

  std::size_t next_sample = 0;
  auto emit_up_to = [&](double t_hi, const Rk45DenseStep* dense, int chart) {
    while (next_sample < sample_times.size() &&
           sample_times[next_sample] <= t_hi) {
      const double ts = sample_times[next_sample];
      ExtendedState st;
      if (dense == nullptr) {
        st = cur;
      } else {
        Eigen::VectorXd ys = dense->eval(ts);
        st.point.chart = chart;
        detail::unpack(ys, st.point.z, st.S);
      }
      traj.states.push_back(st);
      ++next_sample;
    }
  };
  emit_up_to(t0, nullptr, cur.point.chart);

  Rk45Options opt;
  opt.abs_tol = ctrl.abs_tol;
  opt.rel_tol = ctrl.rel_tol;
  opt.max_steps = ctrl.max_steps;

  while (t_cur < t1) {
    const int chart = cur.point.chart;
    auto rhs = [&spec, chart](double, const Eigen::VectorXd& y,
                              Eigen::VectorXd& dy) {
      ExtendedState e;
      e.point.chart = chart;
      detail::unpack(y, e.point.z, e.S);
      TangentVector v = contact_field_in_chart(spec, e);
      dy = detail::pack(v.dz, v.dS);
    };

    Rk45Stepper stepper(rhs, t_cur, detail::pack(cur.point.z, cur.S), opt, t1);
    try {
      Rk45DenseStep dense;
      while (!stepper.done()) {
        stepper.step(dense);
        emit_up_to(stepper.t(), &dense, chart);
        detail::unpack(stepper.y(), cur.point.z, cur.S);
        cur.point.chart = chart;
        t_cur = stepper.t();
        if (!stepper.done() && maybe_switch(t_cur))
          break;  // restart the stepper in the new chart
      }
    } catch (const Error& err) {
      detail::unpack(stepper.y(), cur.point.z, cur.S);
      cur.point.chart = chart;
      throw StepFailure(err.what(), stepper.t(), cur);
    }
  }

  if (traj.states.size() != sample_times.size())
    throw Error("internal: dense sampling incomplete");
  return traj;
}

inline std::vector<double> uniform_samples(double t0, double t1, int count) {
  if (count < 2) throw DomainError("need at least two samples");
  std::vector<double> ts(count);
  for (int i = 0; i < count; ++i)
    ts[i] = t0 + (t1 - t0) * static_cast<double>(i) / (count - 1);
  ts.back() = t1;
  return ts;
}

// ---------------------------------------------------------------------------
// Radiative decay closed form

/// z(t) = e^{i phi0} (e^{gamma t + 2 kappa0} - 1)^{-1/2}
///        e^{-(i/hbar)(H1-H2) t},   chart-2 coordinate of a 2-level system.
inline ProjectiveState decay_closed_form(double h1, double h2, double gamma,
                                         double kappa0, double phi0, double t,
                                         double hbar = 1.0) {
  if (!(gamma > 0.0)) throw DomainError("decay solution requires gamma > 0");
  const double expo = gamma * t + 2.0 * kappa0;
  const double radicand = std::expm1(expo);
  if (!(radicand > 0.0))
    throw DomainError("decay solution undefined: exp(gamma t + 2 kappa0) <= 1");
  const Complex zval = std::polar(1.0 / std::sqrt(radicand),
                                  phi0 - (h1 - h2) * t / hbar);
  ProjectiveState s;
  s.chart = 2;
  s.z.resize(1);
  s.z[0] = zval;
  return s;
}

/// e_H(t) = H2 + (H1-H2) e^{-(gamma t + 2 kappa0)} along the decay solution.
inline double decay_energy(double h1, double h2, double gamma, double kappa0,
                           double t) {
  return h2 + (h1 - h2) * std::exp(-(gamma * t + 2.0 * kappa0));
}

/// sigma^2_H(t) = (1 - e^{-(gamma t + 2k0)}) e^{-(gamma t + 2k0)} (H1-H2)^2.
inline double decay_energy_variance(double h1, double h2, double gamma,
                                    double kappa0, double t) {
  const double u = std::exp(-(gamma * t + 2.0 * kappa0));
  return (1.0 - u) * u * (h1 - h2) * (h1 - h2);
}

/// Transition probability P(t) = e^{-(gamma t + 2 kappa0)}.
inline double decay_transition_probability(double gamma, double kappa0,
                                           double t) {
  return std::exp(-(gamma * t + 2.0 * kappa0));
}

/// Initial state of the decay solution at t=0 for a given kappa0 > 0,
/// expressed in the best-conditioned chart.
inline ProjectiveState decay_initial_state(double h1, double h2, double gamma,
                                           double kappa0, double phi0,
                                           double hbar = 1.0) {
  ProjectiveState s = decay_closed_form(h1, h2, gamma, kappa0, phi0, 0.0, hbar);
  Eigen::VectorXcd psi = homogeneous(s);
  return project(psi, auto_chart(psi));
}

}  // namespace cqd

#endif
