#ifndef CONTACTQD_STATE_SPACE_HPP
#define CONTACTQD_STATE_SPACE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>

#include "contactqd/errors.hpp"

namespace cqd {

using Complex = std::complex<double>;
using HilbertVector = Eigen::VectorXcd;
using DensityMatrix = Eigen::MatrixXcd;

// |pivot| below this fraction of the vector norm makes a chart unusable.
inline constexpr double kChartThreshold = 1e-12;

/// A pure state held in one chart of the standard projective atlas.
///
/// `chart` is the 1-based index j of the homogeneous component divided out;
/// `z` holds the n-1 ratios psi^k/psi^j in component order with slot j
/// removed. Two states are the same point iff their chart transitions agree
/// (see states_equal).
struct ProjectiveState {
  int chart = 1;
  Eigen::VectorXcd z;

  Eigen::Index dim() const { return z.size() + 1; }
};

/// A projective point together with the real fiber coordinate S of the
/// contact extension.
struct ExtendedState {
  ProjectiveState point;
  double S = 0.0;
};

struct BlochPoint {
  double x1 = 0.0, x2 = 0.0, x3 = 0.0;
};

namespace detail {

inline void check_chart_index(Eigen::Index n, int chart) {
  if (chart < 1 || chart > n)
    throw DimensionMismatch("chart index " + std::to_string(chart) +
                            " out of range 1.." + std::to_string(n));
}

// storage slot (0-based) of homogeneous component k (1-based), chart j
inline Eigen::Index slot(int k, int chart) {
  return k < chart ? k - 1 : k - 2;
}

}  // namespace detail

/// Homogeneous representative with the pivot entry set to 1 (not normalized).
inline Eigen::VectorXcd homogeneous(const ProjectiveState& s) {
  const Eigen::Index n = s.dim();
  Eigen::VectorXcd psi(n);
  for (int k = 1; k <= n; ++k)
    psi[k - 1] = (k == s.chart) ? Complex(1.0, 0.0)
                                : s.z[detail::slot(k, s.chart)];
  return psi;
}

/// Chart index with the best-conditioned pivot (largest |psi^j|).
inline int auto_chart(const HilbertVector& psi) {
  Eigen::Index j = 0;
  psi.cwiseAbs().maxCoeff(&j);
  return static_cast<int>(j) + 1;
}

/// Projection of a Hilbert-space vector onto the given chart,
/// z^k = psi^k / psi^j. Invariant under psi -> lambda psi. The pivot must
/// carry at least `threshold` of the vector norm.
inline ProjectiveState project(const HilbertVector& psi, int chart,
                               double threshold = kChartThreshold) {
  const Eigen::Index n = psi.size();
  if (n < 2) throw DimensionMismatch("need at least a 2-level system");
  detail::check_chart_index(n, chart);
  const Complex pivot = psi[chart - 1];
  if (std::abs(pivot) < threshold * psi.norm())
    throw ChartSingular("component " + std::to_string(chart) +
                        " is numerically zero; pick another chart");
  ProjectiveState s;
  s.chart = chart;
  s.z.resize(n - 1);
  for (int k = 1; k <= n; ++k)
    if (k != chart) s.z[detail::slot(k, chart)] = psi[k - 1] / pivot;
  return s;
}

inline ProjectiveState project(const HilbertVector& psi) {
  return project(psi, auto_chart(psi));
}

/// Unit-norm representative (z, .., 1, .., z)/sqrt(1+|z|^2); projecting it
/// back returns the same state.
inline HilbertVector normalized_representative(const ProjectiveState& s) {
  Eigen::VectorXcd psi = homogeneous(s);
  return psi / std::sqrt(1.0 + s.z.squaredNorm());
}

/// Rank-one projector of the state in the original basis.
inline DensityMatrix density_matrix(const ProjectiveState& s) {
  HilbertVector psi = normalized_representative(s);
  return psi * psi.adjoint();
}

/// The same point in another chart.
inline ProjectiveState chart_transition(const ProjectiveState& s,
                                        int new_chart) {
  detail::check_chart_index(s.dim(), new_chart);
  if (new_chart == s.chart) return s;
  return project(homogeneous(s), new_chart);
}

/// Equality as projective points: compares rank-one projectors.
inline bool states_equal(const ProjectiveState& a, const ProjectiveState& b,
                         double tol = 1e-12) {
  if (a.dim() != b.dim()) return false;
  return (density_matrix(a) - density_matrix(b)).norm() <= tol;
}

/// Bloch-sphere image of a qubit state (stereographic from the north pole in
/// the chart-2 coordinate; evaluated chart-independently through the
/// homogeneous representative). z=0 in chart 2 is the south pole (0,0,-1).
inline BlochPoint bloch(const ProjectiveState& s) {
  if (s.dim() != 2)
    throw DimensionMismatch("Bloch coordinates require a 2-level system");
  Eigen::VectorXcd psi = homogeneous(s);
  double nrm = psi.squaredNorm();
  Complex c = psi[0] * std::conj(psi[1]);
  return {2.0 * c.real() / nrm, 2.0 * c.imag() / nrm,
          (std::norm(psi[0]) - std::norm(psi[1])) / nrm};
}

}  // namespace cqd

#endif
