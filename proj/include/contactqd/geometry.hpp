#ifndef CONTACTQD_GEOMETRY_HPP
#define CONTACTQD_GEOMETRY_HPP

#include <Eigen/Dense>
#include <cmath>
#include <vector>
#include <complex>
#include <functional>
#include <memory>
#include <utility>

#include "contactqd/errors.hpp"
#include "contactqd/operators.hpp"
#include "contactqd/state_space.hpp"

namespace cqd {

/// Tangent vector at a point of the extended state space, in the chart of
/// that point: dz holds the holomorphic components, the antiholomorphic ones
/// are their conjugates (vectors tangent to real curves), dS the fiber
/// component.
struct TangentVector {
  Eigen::VectorXcd dz;
  double dS = 0.0;

  Eigen::VectorXcd dzbar() const { return dz.conjugate(); }
};

/// A real-valued function on the extended state space together with its
/// first derivatives: Wirtinger derivatives with respect to the chart
/// coordinates and the plain S-derivative. Expectation-value fields carry
/// analytic derivatives; anything else falls back to central differences.
class ScalarField {
 public:
  using ValueFn = std::function<double(const ExtendedState&)>;

  static ScalarField expectation(HermitianOperator a) {
    ScalarField f;
    auto op = std::make_shared<HermitianOperator>(std::move(a));
    f.value_ = [op](const ExtendedState& e) {
      return expectation_value(*op, e.point);
    };
    f.dz_ = [op](const ExtendedState& e) {
      const auto b = op->blocks(e.point.chart);
      const Eigen::VectorXcd& z = e.point.z;
      const double d = 1.0 + z.squaredNorm();
      const double ev = expectation_value(*op, e.point);
      // d e / d z^k = ((z^dag H1)_k + conj(v_k) - e conj(z_k)) / (1+|z|^2)
      return ((b.h1.transpose() * z.conjugate() + b.v.conjugate() -
               ev * z.conjugate()) /
              d)
          .eval();
    };
    f.dS_ = [](const ExtendedState&) { return 0.0; };
    return f;
  }

  /// The fiber coordinate S itself.
  static ScalarField fiber_coordinate() {
    ScalarField f;
    f.value_ = [](const ExtendedState& e) { return e.S; };
    f.dz_ = [](const ExtendedState& e) {
      return Eigen::VectorXcd::Zero(e.point.z.size()).eval();
    };
    f.dS_ = [](const ExtendedState&) { return 1.0; };
    return f;
  }

  /// Generic field; derivatives by central differences with the given
  /// absolute step on each real coordinate.
  static ScalarField from_function(ValueFn fn, double fd_step = 1e-6) {
    ScalarField f;
    f.value_ = fn;
    f.dz_ = [fn, fd_step](const ExtendedState& e) {
      const Eigen::Index m = e.point.z.size();
      Eigen::VectorXcd d(m);
      ExtendedState p = e;
      for (Eigen::Index k = 0; k < m; ++k) {
        const Complex z0 = e.point.z[k];
        p.point.z[k] = z0 + fd_step;
        double fxp = fn(p);
        p.point.z[k] = z0 - fd_step;
        double fxm = fn(p);
        p.point.z[k] = z0 + Complex(0, fd_step);
        double fyp = fn(p);
        p.point.z[k] = z0 - Complex(0, fd_step);
        double fym = fn(p);
        p.point.z[k] = z0;
        double fx = (fxp - fxm) / (2 * fd_step);
        double fy = (fyp - fym) / (2 * fd_step);
        d[k] = 0.5 * Complex(fx, -fy);
      }
      return d;
    };
    f.dS_ = [fn, fd_step](const ExtendedState& e) {
      ExtendedState p = e;
      p.S = e.S + fd_step;
      double fp = fn(p);
      p.S = e.S - fd_step;
      double fm = fn(p);
      return (fp - fm) / (2 * fd_step);
    };
    return f;
  }

  /// Field with caller-supplied analytic derivatives.
  static ScalarField analytic(
      ValueFn value, std::function<Eigen::VectorXcd(const ExtendedState&)> dz,
      std::function<double(const ExtendedState&)> dS) {
    ScalarField f;
    f.value_ = std::move(value);
    f.dz_ = std::move(dz);
    f.dS_ = std::move(dS);
    return f;
  }

  double value(const ExtendedState& e) const { return value_(e); }
  Eigen::VectorXcd dz(const ExtendedState& e) const { return dz_(e); }
  Eigen::VectorXcd dzbar(const ExtendedState& e) const {
    return dz_(e).conjugate();
  }
  double dS(const ExtendedState& e) const { return dS_(e); }

  /// (z^dag H1 z + z^dag v + v^dag z + h2) / (1+|z|^2) = Tr(rho A)
  static double expectation_value(const HermitianOperator& a,
                                  const ProjectiveState& s) {
    if (a.dim() != s.dim())
      throw DimensionMismatch("operator/state dimensions differ");
    const auto b = a.blocks(s.chart);
    const Eigen::VectorXcd& z = s.z;
    const Complex num = (z.adjoint() * b.h1 * z)(0) + z.dot(b.v) +
                        b.v.dot(z) + b.h2;
    return num.real() / (1.0 + z.squaredNorm());
  }

 private:
  ValueFn value_;
  std::function<Eigen::VectorXcd(const ExtendedState&)> dz_;
  std::function<double(const ExtendedState&)> dS_;
};

namespace detail {

// pairing <z, dz part of v> = sum_k conj(z_k) v_k
inline Complex zbar_pairing(const ProjectiveState& s, const TangentVector& v) {
  return s.z.dot(v.dz);
}

// sum_k z^k (dA/dz^k)
inline Complex z_times(const Eigen::VectorXcd& z, const Eigen::VectorXcd& dA) {
  return (z.array() * dA.array()).sum();
}

}  // namespace detail

/// Canonical 1-form, (hbar/2i)(zbar_k dz^k - z^k dzbar_k)/(1+|z|^2).
inline double theta_fs(const ProjectiveState& s, const TangentVector& v,
                       double hbar = 1.0) {
  const double d = 1.0 + s.z.squaredNorm();
  return hbar * detail::zbar_pairing(s, v).imag() / d;
}

/// Fubini-Study symplectic form evaluated on two tangent vectors.
inline double omega_fs(const ProjectiveState& s, const TangentVector& v,
                       const TangentVector& w, double hbar = 1.0) {
  const double d = 1.0 + s.z.squaredNorm();
  const Complex av = detail::zbar_pairing(s, v);
  const Complex aw = detail::zbar_pairing(s, w);
  return 2.0 * hbar / (d * d) *
         (d * v.dz.dot(w.dz).imag() - (std::conj(av) * aw).imag());
}

/// Fubini-Study metric, positive-definite normalization (the squared
/// line element of state distance). The bracket evaluators below use the
/// opposite overall sign internally so that variance = -(hbar/2){eA,eA}_g.
inline double g_fs(const ProjectiveState& s, const TangentVector& v,
                   const TangentVector& w, double hbar = 1.0) {
  const double d = 1.0 + s.z.squaredNorm();
  const Complex av = detail::zbar_pairing(s, v);
  const Complex aw = detail::zbar_pairing(s, w);
  return 2.0 * hbar / (d * d) *
         (d * v.dz.dot(w.dz).real() - (std::conj(av) * aw).real());
}

/// Complex structure J: dz -> dz/i on the projective directions.
inline TangentVector j_fs(const TangentVector& v) {
  return {Complex(0, -1) * v.dz, 0.0};
}

/// Contact form eta = dS - theta_fs.
inline double eta(const ExtendedState& e, const TangentVector& v,
                  double hbar = 1.0) {
  return v.dS - theta_fs(e.point, v, hbar);
}

/// Reeb field: the unit S-direction (eta(xi)=1, xi into d(eta) vanishes,
/// g(xi,.)=(2/hbar) eta).
inline TangentVector reeb(const ExtendedState& e) {
  return {Eigen::VectorXcd::Zero(e.point.z.size()), 1.0};
}

/// Extended (Sasaki) metric g = g_fs + (2/hbar) eta (x) eta, in the sign
/// convention of the bracket chain (projective part negative-definite), so
/// that the extended gradient satisfies g_ext(Y_A, .) = dA exactly.
inline double g_ext(const ExtendedState& e, const TangentVector& v,
                    const TangentVector& w, double hbar = 1.0) {
  return -g_fs(e.point, v, w, hbar) +
         (2.0 / hbar) * eta(e, v, hbar) * eta(e, w, hbar);
}

/// Endomorphism phi = J - (hbar/(2(1+|z|^2)))(z^k dzbar_k + zbar_k dz^k) (x)
/// d/dS, with phi^2 = -I + eta (x) xi.
inline TangentVector phi(const ExtendedState& e, const TangentVector& v,
                         double hbar = 1.0) {
  const double d = 1.0 + e.point.z.squaredNorm();
  TangentVector out = j_fs(v);
  out.dS = -(hbar / d) * detail::zbar_pairing(e.point, v).real();
  return out;
}

/// Poisson bracket of two basic (S-independent) fields at a state.
inline double poisson(const ScalarField& a, const ScalarField& b,
                      const ProjectiveState& s, double hbar = 1.0) {
  ExtendedState e{s, 0.0};
  const Eigen::VectorXcd da = a.dz(e), db = b.dz(e);
  const double d = 1.0 + s.z.squaredNorm();
  const Complex u = db.dot(da);  // sum dA_k conj(dB_k)
  const Complex alpha_a = detail::z_times(s.z, da);
  const Complex alpha_b = detail::z_times(s.z, db);
  return (2.0 * d / hbar) * (u.imag() + (alpha_a * std::conj(alpha_b)).imag());
}

/// Jordan (metric) bracket of two basic fields; the variance of an
/// observable A is -(hbar/2) jordan(eA, eA).
inline double jordan(const ScalarField& a, const ScalarField& b,
                     const ProjectiveState& s, double hbar = 1.0) {
  ExtendedState e{s, 0.0};
  const Eigen::VectorXcd da = a.dz(e), db = b.dz(e);
  const double d = 1.0 + s.z.squaredNorm();
  const Complex u = db.dot(da);
  const Complex alpha_a = detail::z_times(s.z, da);
  const Complex alpha_b = detail::z_times(s.z, db);
  return -(2.0 * d / hbar) *
         (u.real() + (alpha_a * std::conj(alpha_b)).real());
}

/// Extended Jordan product on the contact extension; reduces to jordan()
/// when both fields are S-independent.
inline double extended_jordan(const ScalarField& a, const ScalarField& b,
                              const ExtendedState& e, double hbar = 1.0) {
  const Eigen::VectorXcd da = a.dz(e), db = b.dz(e);
  const Eigen::VectorXcd& z = e.point.z;
  const double q = z.squaredNorm();
  const double d = 1.0 + q;
  const Complex u = db.dot(da);
  const Complex alpha_a = detail::z_times(z, da);
  const Complex alpha_b = detail::z_times(z, db);
  const double sa = a.dS(e), sb = b.dS(e);
  double base = -(2.0 * d / hbar) *
                (u.real() + (alpha_a * std::conj(alpha_b)).real());
  return base + d * (sa * alpha_b.imag() + sb * alpha_a.imag()) +
         0.5 * hbar * (1.0 - q) * sa * sb;
}

/// Contact variance sigma^2_A = -(hbar/2){A,A}_g on the extension.
inline double contact_variance(const ScalarField& a, const ExtendedState& e,
                               double hbar = 1.0) {
  return -0.5 * hbar * extended_jordan(a, a, e, hbar);
}

/// Full-rank test of eta ^ (d eta)^(n-1) at a point: assembles the bordered
/// coefficient matrix [[0, eta(b_j)], [-eta(b_i), d eta(b_i, b_j)]] over a
/// real tangent basis and checks its rank.
inline bool contact_nondegenerate(const ExtendedState& e, double hbar = 1.0) {
  const Eigen::Index m = e.point.z.size();
  const Eigen::Index dim = 2 * m + 1;
  std::vector<TangentVector> basis;
  basis.reserve(dim);
  for (Eigen::Index k = 0; k < m; ++k) {
    TangentVector vx{Eigen::VectorXcd::Zero(m), 0.0};
    vx.dz[k] = 1.0;
    basis.push_back(vx);
    TangentVector vy{Eigen::VectorXcd::Zero(m), 0.0};
    vy.dz[k] = Complex(0, 1);
    basis.push_back(vy);
  }
  basis.push_back(reeb(e));

  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(dim + 1, dim + 1);
  for (Eigen::Index i = 0; i < dim; ++i) {
    double h = eta(e, basis[i], hbar);
    mat(0, i + 1) = h;
    mat(i + 1, 0) = -h;
    for (Eigen::Index j = 0; j < dim; ++j) {
      // d eta = -omega_fs on the projective legs, no dS legs
      double w = -omega_fs(e.point, basis[i], basis[j], hbar);
      mat(i + 1, j + 1) = w;
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(mat);
  lu.setThreshold(1e-10);
  return lu.rank() == dim + 1;
}

}  // namespace cqd

#endif
