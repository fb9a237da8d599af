#ifndef CONTACTQD_RK45_HPP
#define CONTACTQD_RK45_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "contactqd/errors.hpp"

namespace cqd {

// Embedded Dormand-Prince 5(4) pair with the classical quartic dense-output
// interpolant. The flows integrated here are smooth and low-dimensional, so
// this is the whole integration story; stiffness near chart boundaries is
// handled by the caller re-expressing coordinates, not by the stepper.

struct Rk45Options {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double h_init = 0.0;  // 0 = pick automatically
  double h_max = 0.0;   // 0 = span
  long max_steps = 2'000'000;
};

using OdeRhs =
    std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)>;

namespace rk45_detail {

// Butcher tableau (Dormand & Prince 1980).
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                        c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - bhat
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                        e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense-output weights
inline constexpr double d1 = -12715105075.0 / 11282082432.0,
                        d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0,
                        d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0,
                        d7 = 69997945.0 / 29380423.0;

}  // namespace rk45_detail

// One accepted step, exposed to the caller for dense sampling: evaluates the
// interpolant at any t in [t0, t1].
class Rk45DenseStep {
 public:
  double t0() const { return t0_; }
  double t1() const { return t0_ + h_; }

  Eigen::VectorXd eval(double t) const {
    double theta = (t - t0_) / h_;
    double th1 = 1.0 - theta;
    return r1_ + theta * (r2_ + th1 * (r3_ + theta * (r4_ + th1 * r5_)));
  }

 private:
  friend class Rk45Stepper;
  double t0_ = 0.0, h_ = 0.0;
  Eigen::VectorXd r1_, r2_, r3_, r4_, r5_;
};

class Rk45Stepper {
 public:
  Rk45Stepper(OdeRhs rhs, double t0, Eigen::VectorXd y0,
              const Rk45Options& opt, double t_end)
      : rhs_(std::move(rhs)), opt_(opt), t_(t0), t_end_(t_end),
        y_(std::move(y0)) {
    const Eigen::Index n = y_.size();
    k1_.resize(n); k2_.resize(n); k3_.resize(n); k4_.resize(n);
    k5_.resize(n); k6_.resize(n); k7_.resize(n); ytmp_.resize(n);
    rhs_(t_, y_, k1_);
    h_ = opt.h_init > 0.0 ? opt.h_init : initial_step();
  }

  double t() const { return t_; }
  const Eigen::VectorXd& y() const { return y_; }
  bool done() const { return t_ >= t_end_; }
  long steps_taken() const { return n_steps_; }

  // Advance one accepted step; fills `dense`. Throws when the controller
  // cannot meet the tolerance.
  void step(Rk45DenseStep& dense) {
    using namespace rk45_detail;
    const double span = t_end_ - t_;
    const double hmax = opt_.h_max > 0.0 ? opt_.h_max : std::abs(span);
    for (;;) {
      if (++n_steps_ > opt_.max_steps)
        throw Error("rk45: step budget exhausted");
      double h = std::min(h_, hmax);
      bool last = false;
      if (t_ + h >= t_end_) {
        h = t_end_ - t_;
        last = true;
      }
      if (!(h > 0.0) || t_ + h == t_)
        throw Error("rk45: step size underflow at t=" + std::to_string(t_));

      ytmp_ = y_ + h * (a21 * k1_);
      rhs_(t_ + c2 * h, ytmp_, k2_);
      ytmp_ = y_ + h * (a31 * k1_ + a32 * k2_);
      rhs_(t_ + c3 * h, ytmp_, k3_);
      ytmp_ = y_ + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
      rhs_(t_ + c4 * h, ytmp_, k4_);
      ytmp_ = y_ + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
      rhs_(t_ + c5 * h, ytmp_, k5_);
      ytmp_ = y_ + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ +
                        a65 * k5_);
      rhs_(t_ + h, ytmp_, k6_);
      Eigen::VectorXd y1 =
          y_ + h * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
      rhs_(t_ + h, y1, k7_);  // FSAL

      // scaled RMS error of the embedded 4th-order difference
      double err = 0.0;
      const Eigen::Index n = y_.size();
      for (Eigen::Index i = 0; i < n; ++i) {
        double ei = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] +
                         e5 * k5_[i] + e6 * k6_[i] + e7 * k7_[i]);
        double sc = opt_.abs_tol +
                    opt_.rel_tol * std::max(std::abs(y_[i]), std::abs(y1[i]));
        err += (ei / sc) * (ei / sc);
      }
      err = std::sqrt(err / static_cast<double>(n));

      double fac = 0.9 * std::pow(std::max(err, 1e-30), -0.2);
      fac = std::clamp(fac, 0.2, 5.0);
      if (err <= 1.0) {
        fill_dense(dense, h, y1);
        t_ = last ? t_end_ : t_ + h;
        y_.swap(y1);
        k1_.swap(k7_);
        h_ = h * fac;
        return;
      }
      h_ = h * std::min(fac, 1.0);
      if (h_ < 16.0 * std::numeric_limits<double>::epsilon() *
                   std::max(std::abs(t_), 1.0))
        throw Error("rk45: tolerance unattainable at t=" + std::to_string(t_));
    }
  }

 private:
  double initial_step() const {
    double ynorm = y_.norm();
    double fnorm = k1_.norm();
    double scale = opt_.abs_tol + opt_.rel_tol * ynorm;
    double h = fnorm > 1e-300 ? 0.01 * std::max(scale / fnorm, 1e-12)
                              : 1e-6 * (t_end_ - t_);
    return std::min(h, std::abs(t_end_ - t_));
  }

  void fill_dense(Rk45DenseStep& d, double h, const Eigen::VectorXd& y1) {
    using namespace rk45_detail;
    d.t0_ = t_;
    d.h_ = h;
    d.r1_ = y_;
    d.r2_ = y1 - y_;
    d.r3_ = h * k1_ - d.r2_;
    d.r4_ = d.r2_ - h * k7_ - d.r3_;
    d.r5_ = h * (d1 * k1_ + d3 * k3_ + d4 * k4_ + d5 * k5_ + d6 * k6_ +
                 d7 * k7_);
  }

  OdeRhs rhs_;
  Rk45Options opt_;
  double t_, t_end_, h_ = 0.0;
  long n_steps_ = 0;
  Eigen::VectorXd y_, ytmp_;
  Eigen::VectorXd k1_, k2_, k3_, k4_, k5_, k6_, k7_;
};

}  // namespace cqd

#endif
