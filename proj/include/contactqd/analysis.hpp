#ifndef CONTACTQD_ANALYSIS_HPP
#define CONTACTQD_ANALYSIS_HPP

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "contactqd/dynamics.hpp"
#include "contactqd/errors.hpp"
#include "contactqd/operators.hpp"
#include "contactqd/state_space.hpp"

namespace cqd {

enum class PointType {
  center,
  stable_focus,
  unstable_focus,
  stable_node,
  unstable_node,
  saddle,
  non_hyperbolic,
};

inline const char* to_string(PointType t) {
  switch (t) {
    case PointType::center: return "center";
    case PointType::stable_focus: return "stable focus";
    case PointType::unstable_focus: return "unstable focus";
    case PointType::stable_node: return "stable node";
    case PointType::unstable_node: return "unstable node";
    case PointType::saddle: return "saddle";
    case PointType::non_hyperbolic: return "non-hyperbolic";
  }
  return "?";
}

/// A zero of the planar qubit flow in some chart, with the linearization's
/// eigenvalue pair. For the chart-boundary point of a dissipative flow the
/// field is singular rather than zero and no eigenvalues exist; such census
/// entries carry field_singular = true.
struct CriticalPoint {
  Complex z;
  int chart = 2;
  std::array<Complex, 2> eigenvalues{};
  PointType type = PointType::non_hyperbolic;
  bool field_singular = false;
};

/// Regime of the dissipative qubit (H1 = H2) as gamma varies:
/// i: Delta < 0, one point; ii: Delta = 0, merged pair; iii: Delta > 0,
/// three points with foci or nodes depending on Delta/hbar^2 - gamma^2/4.
struct BifurcationReport {
  double delta_minus = 0.0;
  char regime = 'i';  // 'i', 'j' (= item ii), 'k' (= item iii)? no: see below
  std::string regime_name;
  bool foci_subcase = false;
};

namespace detail {

// Eigenvalues of the real 2x2 Jacobian of z' = F(z, zbar) from the Wirtinger
// pair (a, b) = (dF/dz, dF/dzbar): lambda = Re a +- sqrt(|b|^2 - (Im a)^2).
inline std::array<Complex, 2> planar_eigenvalues(Complex a, Complex b) {
  const double re = a.real();
  const double disc = std::norm(b) - a.imag() * a.imag();
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    return {Complex(re + s, 0.0), Complex(re - s, 0.0)};
  }
  const double s = std::sqrt(-disc);
  return {Complex(re, s), Complex(re, -s)};
}

inline PointType classify_eigenvalues(const std::array<Complex, 2>& lam,
                                      double scale_tol) {
  const Complex l1 = lam[0], l2 = lam[1];
  const double tol = scale_tol;
  const bool complex_pair = std::abs(l1.imag()) > tol;
  if (complex_pair) {
    if (std::abs(l1.real()) <= tol) return PointType::center;
    return l1.real() < 0.0 ? PointType::stable_focus
                           : PointType::unstable_focus;
  }
  const double a = l1.real(), b = l2.real();
  if (std::abs(a) <= tol || std::abs(b) <= tol)
    return PointType::non_hyperbolic;
  if (a * b < 0.0) return PointType::saddle;
  return a < 0.0 ? PointType::stable_node : PointType::unstable_node;
}

}  // namespace detail

/// z' of the dissipative qubit in the chart of the reference contactification
/// (gamma = 0 gives the conservative Riccati flow).
inline Complex qubit_rhs(double h1, double h2, Complex v, double gamma,
                         double hbar, Complex z) {
  const Complex riccati = (Complex(0, 1) / hbar) *
                          (std::conj(v) * z * z - (h1 - h2) * z - v);
  return riccati - 0.5 * gamma * z * (1.0 + std::norm(z));
}

/// Wirtinger derivatives (dF/dz, dF/dzbar) of qubit_rhs.
inline std::pair<Complex, Complex> qubit_rhs_wirtinger(double h1, double h2,
                                                       Complex v, double gamma,
                                                       double hbar, Complex z) {
  const Complex a = (Complex(0, 1) / hbar) * (2.0 * std::conj(v) * z -
                                              (h1 - h2)) -
                    0.5 * gamma * (1.0 + 2.0 * std::norm(z));
  const Complex b = -0.5 * gamma * z * z;
  return {a, b};
}

/// Same Jacobian by central differences on the real chart coordinates.
inline std::pair<Complex, Complex> qubit_rhs_wirtinger_fd(double h1, double h2,
                                                          Complex v,
                                                          double gamma,
                                                          double hbar,
                                                          Complex z,
                                                          double step = 1e-6) {
  auto f = [&](Complex w) { return qubit_rhs(h1, h2, v, gamma, hbar, w); };
  const Complex fx = (f(z + step) - f(z - step)) / (2.0 * step);
  const Complex fy =
      (f(z + Complex(0, step)) - f(z - Complex(0, step))) / (2.0 * step);
  return {0.5 * (fx - Complex(0, 1) * fy), 0.5 * (fx + Complex(0, 1) * fy)};
}

/// The two centers of the conservative qubit flow,
/// z_pm = ((H1-H2) +- sqrt((H1-H2)^2 + 4|V|^2)) / (2 conj(V)).
inline std::array<CriticalPoint, 2> conservative_critical_points(
    double h1, double h2, Complex v, double hbar = 1.0) {
  if (std::abs(v) == 0.0)
    throw DegenerateV(
        "V = 0 is degenerate: the critical points are the two poles");
  const double dh = h1 - h2;
  const double root = std::sqrt(dh * dh + 4.0 * std::norm(v));
  std::array<CriticalPoint, 2> out;
  const double scale = std::max({std::abs(h1), std::abs(h2), std::abs(v), 1.0});
  for (int i = 0; i < 2; ++i) {
    const double sgn = i == 0 ? 1.0 : -1.0;
    CriticalPoint p;
    p.z = (dh + sgn * root) / (2.0 * std::conj(v));
    auto [a, b] = qubit_rhs_wirtinger(h1, h2, v, 0.0, hbar, p.z);
    p.eigenvalues = detail::planar_eigenvalues(a, b);
    p.type = detail::classify_eigenvalues(p.eigenvalues, 1e-10 * scale);
    out[i] = p;
  }
  return out;
}

/// Critical points of the dissipative qubit with H1 = H2:
/// the unit-circle pair z^(1,2) = (-i hbar gamma +- sqrt(Delta))/(2 conj(V))
/// exists iff Delta = 4|V|^2 - hbar^2 gamma^2 >= 0, and z^(3) = -2iV/(hbar
/// gamma) always. At Delta = 0 the merged pair is kept as one entry (the
/// returned list then has two entries which coincide spatially with z^(3)).
inline std::vector<CriticalPoint> dissipative_critical_points(
    double h1, double h2, Complex v, double gamma, double hbar = 1.0) {
  if (h1 != h2)
    throw UnsupportedScenario(
        "closed-form dissipative critical points require H1 = H2");
  if (std::abs(v) == 0.0) throw DegenerateV("V = 0 not covered here");
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive");

  const double delta = 4.0 * std::norm(v) - hbar * hbar * gamma * gamma;
  const double eps = 1e-12 * 4.0 * std::norm(v);
  const double scale =
      std::max({std::abs(h1), std::abs(v), gamma, 1.0});

  std::vector<CriticalPoint> out;
  auto push = [&](Complex z) {
    CriticalPoint p;
    p.z = z;
    auto [a, b] = qubit_rhs_wirtinger(h1, h2, v, gamma, hbar, z);
    p.eigenvalues = detail::planar_eigenvalues(a, b);
    p.type = detail::classify_eigenvalues(p.eigenvalues, 1e-9 * scale);
    out.push_back(p);
  };

  if (delta >= -eps) {
    const double root = std::sqrt(std::max(delta, 0.0));
    const Complex num(0.0, -hbar * gamma);
    if (delta > eps) {
      push((num + root) / (2.0 * std::conj(v)));
      push((num - root) / (2.0 * std::conj(v)));
    } else {
      push(num / (2.0 * std::conj(v)));  // merged pair
    }
  }
  push(Complex(0, -2.0) * v / (hbar * gamma));
  return out;
}

inline BifurcationReport classify_bifurcation(Complex v, double gamma,
                                              double hbar = 1.0) {
  if (std::abs(v) == 0.0) throw DegenerateV("V = 0 not covered here");
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
  BifurcationReport rep;
  rep.delta_minus = 4.0 * std::norm(v) - hbar * hbar * gamma * gamma;
  const double eps = 1e-12 * 4.0 * std::norm(v);
  if (rep.delta_minus > eps) {
    rep.regime = '3';
    rep.regime_name = "iii";
    rep.foci_subcase =
        rep.delta_minus / (hbar * hbar) - 0.25 * gamma * gamma > 0.0;
  } else if (rep.delta_minus < -eps) {
    rep.regime = '1';
    rep.regime_name = "i";
  } else {
    rep.regime = '2';
    rep.regime_name = "ii";
  }
  return rep;
}

/// Behavior of the flow at the chart boundary (the north pole for the
/// standard chart). For gamma != 0 the pushed-forward field has the
/// non-Lipschitz radial part (gamma/2) w/|w|^2 there: a singular source
/// (sink for gamma < 0), node-like when the rotation rate (H1-H2)/hbar
/// vanishes and focus-like otherwise. For gamma = 0 the pole is a regular
/// point unless V = 0, in which case it is a center.
inline std::optional<CriticalPoint> north_pole_point(double h1, double h2,
                                                     Complex v, double gamma,
                                                     double hbar = 1.0) {
  CriticalPoint p;
  p.chart = 1;
  p.z = 0.0;
  if (gamma != 0.0) {
    p.field_singular = true;
    const bool rotating = h1 != h2;
    if (gamma > 0.0)
      p.type = rotating ? PointType::unstable_focus : PointType::unstable_node;
    else
      p.type = rotating ? PointType::stable_focus : PointType::stable_node;
    return p;
  }
  if (std::abs(v) == 0.0) {
    p.eigenvalues = {Complex(0, (h1 - h2) / hbar), Complex(0, -(h1 - h2) / hbar)};
    p.type = h1 != h2 ? PointType::center : PointType::non_hyperbolic;
    return p;
  }
  return std::nullopt;  // regular point of the conservative flow
}

/// The z' field seen from the opposite chart (w = 1/z), i.e. the pushforward
/// of the reference flow: w' = (i/hbar)(V w^2 + (H1-H2) w - conj(V))
///                            + (gamma/2) w (1+|w|^2)/|w|^2.
inline Complex qubit_rhs_antipodal(double h1, double h2, Complex v,
                                   double gamma, double hbar, Complex w) {
  const Complex conservative =
      (Complex(0, 1) / hbar) * (v * w * w + (h1 - h2) * w - std::conj(v));
  const double q = std::norm(w);
  if (q == 0.0)
    throw ChartSingular("the pushed-forward coupling field is singular at 0");
  return conservative + 0.5 * gamma * w * (1.0 + q) / q;
}

/// Closed-form critical-point census of a qubit scenario (both charts).
/// Throws UnsupportedScenario for the dissipative case with H1 != H2 and
/// V != 0, which has no closed form here.
inline std::vector<CriticalPoint> qubit_census(double h1, double h2, Complex v,
                                               double gamma,
                                               double hbar = 1.0) {
  std::vector<CriticalPoint> census;
  const double scale = std::max({std::abs(h1), std::abs(h2), std::abs(v), 1.0});
  if (std::abs(v) == 0.0) {
    if (gamma == 0.0 && h1 == h2) return census;  // identity flow
    CriticalPoint origin;
    origin.z = 0.0;
    origin.chart = 2;
    auto [a, b] = qubit_rhs_wirtinger(h1, h2, v, gamma, hbar, 0.0);
    origin.eigenvalues = detail::planar_eigenvalues(a, b);
    origin.type = detail::classify_eigenvalues(origin.eigenvalues,
                                               1e-10 * scale);
    census.push_back(origin);
  } else if (gamma == 0.0) {
    for (const auto& p : conservative_critical_points(h1, h2, v, hbar))
      census.push_back(p);
  } else if (h1 == h2) {
    for (const auto& p : dissipative_critical_points(h1, h2, v, gamma, hbar))
      census.push_back(p);
  } else {
    throw UnsupportedScenario(
        "no closed-form census for the dissipative qubit with H1 != H2 and "
        "V != 0");
  }
  if (auto pole = north_pole_point(h1, h2, v, gamma, hbar)) {
    if (!(std::abs(v) == 0.0 && gamma == 0.0 && h1 == h2))
      census.push_back(*pole);
  }
  return census;
}

// ---------------------------------------------------------------------------
// Phase portraits

struct PortraitSample {
  int chart = 2;
  Complex z;
  Complex zdot;
  BlochPoint x;
};

struct StreamlinePoint {
  int seed = 0;
  double t = 0.0;
  Complex z;  // chart-2 coordinate
};

struct PortraitOptions {
  double x0 = -4.0, x1 = 4.0, y0 = -4.0, y1 = 4.0;
  int nx = 21, ny = 21;
  bool both_charts = true;
  int streamline_seeds = 8;
  double streamline_span = 1.0;
};

struct Portrait {
  std::vector<PortraitSample> samples;
  std::vector<CriticalPoint> census;
  bool census_available = true;
  std::vector<StreamlinePoint> streamlines;
};

/// Samples the flow of a qubit scenario on a rectangular window, in the
/// reference chart and (optionally) the antipodal one, together with short
/// streamlines and the critical-point census.
inline Portrait phase_portrait(double h1, double h2, Complex v, double gamma,
                               double hbar, const PortraitOptions& opt) {
  Portrait out;
  auto sample_chart = [&](int chart) {
    for (int iy = 0; iy < opt.ny; ++iy) {
      for (int ix = 0; ix < opt.nx; ++ix) {
        const double x =
            opt.x0 + (opt.x1 - opt.x0) * (opt.nx == 1 ? 0.5 : double(ix) / (opt.nx - 1));
        const double y =
            opt.y0 + (opt.y1 - opt.y0) * (opt.ny == 1 ? 0.5 : double(iy) / (opt.ny - 1));
        PortraitSample smp;
        smp.chart = chart;
        smp.z = Complex(x, y);
        if (chart == 2) {
          smp.zdot = qubit_rhs(h1, h2, v, gamma, hbar, smp.z);
        } else {
          if (std::norm(smp.z) == 0.0 && gamma != 0.0) {
            smp.zdot = Complex(std::numeric_limits<double>::quiet_NaN(),
                               std::numeric_limits<double>::quiet_NaN());
          } else if (std::norm(smp.z) == 0.0) {
            smp.zdot = (Complex(0, 1) / hbar) * (-std::conj(v));
          } else {
            smp.zdot = qubit_rhs_antipodal(h1, h2, v, gamma, hbar, smp.z);
          }
        }
        ProjectiveState s;
        s.chart = chart;
        s.z.resize(1);
        s.z[0] = smp.z;
        smp.x = bloch(s);
        out.samples.push_back(smp);
      }
    }
  };
  sample_chart(2);
  if (opt.both_charts) sample_chart(1);

  try {
    out.census = qubit_census(h1, h2, v, gamma, hbar);
  } catch (const UnsupportedScenario&) {
    out.census_available = false;
  }

  // short streamlines from seeds on a coarse subgrid of the window
  const HermitianOperator hop = qubit_operator(h1, h2, v);
  ContactHamiltonianSpec spec{hop, LinearCoupling{gamma}, hbar};
  const int ns = std::max(opt.streamline_seeds, 0);
  for (int i = 0; i < ns; ++i) {
    const double fx = (i % 4 + 0.5) / 4.0;
    const double fy = (i / 4 % 4 + 0.5) / 4.0;
    ExtendedState e0;
    e0.point.chart = 2;
    e0.point.z.resize(1);
    e0.point.z[0] = Complex(opt.x0 + fx * (opt.x1 - opt.x0),
                            opt.y0 + fy * (opt.y1 - opt.y0));
    try {
      StepControl ctrl;
      ctrl.abs_tol = ctrl.rel_tol = 1e-8;
      const auto ts = uniform_samples(0.0, opt.streamline_span, 33);
      const Trajectory tr = integrate(spec, e0, 0.0, opt.streamline_span, ts,
                                      ctrl);
      for (std::size_t k = 0; k < tr.times.size(); ++k) {
        const ProjectiveState& p = tr.states[k].point;
        const ProjectiveState p2 =
            p.chart == 2 ? p : chart_transition(p, 2);
        out.streamlines.push_back({i, tr.times[k], p2.z[0]});
      }
    } catch (const Error&) {
      // a seed that runs into the singular locus is simply dropped
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trajectory post-processing

struct ObservableRow {
  double t = 0.0;
  double e_H = 0.0;
  double var_H = 0.0;
  double P = 0.0;
  double S = 0.0;
  std::optional<BlochPoint> x;
};

/// Per-sample observables along a trajectory: energy expectation, energy
/// variance, transition probability (population of basis state 1), S, and
/// Bloch coordinates for qubits.
inline std::vector<ObservableRow> trajectory_observables(
    const Trajectory& traj, const HermitianOperator& h) {
  const HermitianOperator proj = excited_projector(h.dim());
  std::vector<ObservableRow> rows;
  rows.reserve(traj.times.size());
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const ProjectiveState& s = traj.states[i].point;
    ObservableRow r;
    r.t = traj.times[i];
    r.e_H = expectation(h, s);
    r.var_H = variance(h, s);
    r.P = expectation(proj, s);
    r.S = traj.states[i].S;
    if (h.dim() == 2) r.x = bloch(s);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace cqd

#endif
