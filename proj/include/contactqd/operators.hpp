#ifndef CONTACTQD_OPERATORS_HPP
#define CONTACTQD_OPERATORS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include "contactqd/errors.hpp"
#include "contactqd/state_space.hpp"

namespace cqd {

/// An n x n complex Hermitian matrix (observable, Hamiltonian, dissipative
/// potential). Validates hermiticity on construction.
class HermitianOperator {
 public:
  explicit HermitianOperator(Eigen::MatrixXcd m, double tol = 1e-12)
      : m_(std::move(m)) {
    if (m_.rows() != m_.cols())
      throw DimensionMismatch("operator matrix must be square");
    double scale = std::max(m_.cwiseAbs().maxCoeff(), 1.0);
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > tol * scale)
      throw Error("operator matrix is not Hermitian");
  }

  const Eigen::MatrixXcd& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

  /// Blocks of the operator in the frame of a chart: basis reordered so the
  /// pivot component comes last. h1 is (n-1)x(n-1), v the column coupling the
  /// pivot, h2 the (real) pivot diagonal entry.
  struct Blocks {
    Eigen::MatrixXcd h1;
    Eigen::VectorXcd v;
    double h2 = 0.0;
  };

  Blocks blocks(int chart) const {
    const Eigen::Index n = dim();
    detail::check_chart_index(n, chart);
    Blocks b;
    b.h1.resize(n - 1, n - 1);
    b.v.resize(n - 1);
    Eigen::Index r = 0;
    for (int j = 1; j <= n; ++j) {
      if (j == chart) continue;
      Eigen::Index c = 0;
      for (int k = 1; k <= n; ++k) {
        if (k == chart) continue;
        b.h1(r, c++) = m_(j - 1, k - 1);
      }
      b.v[r++] = m_(j - 1, chart - 1);
    }
    b.h2 = m_(chart - 1, chart - 1).real();
    return b;
  }

 private:
  Eigen::MatrixXcd m_;
};

/// 2x2 operator [[h1, v],[conj(v), h2]].
inline HermitianOperator qubit_operator(double h1, double h2, Complex v) {
  Eigen::MatrixXcd m(2, 2);
  m << h1, v, std::conj(v), h2;
  return HermitianOperator(std::move(m));
}

inline HermitianOperator pauli_x() { return qubit_operator(0, 0, {1, 0}); }
inline HermitianOperator pauli_y() { return qubit_operator(0, 0, {0, -1}); }
inline HermitianOperator pauli_z() { return qubit_operator(1, -1, {0, 0}); }

/// Projector |e_1><e_1| onto the first basis state (the excited level in the
/// radiative-decay setup); its expectation is the transition probability.
inline HermitianOperator excited_projector(Eigen::Index n) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  m(0, 0) = 1.0;
  return HermitianOperator(std::move(m));
}

}  // namespace cqd

#endif
