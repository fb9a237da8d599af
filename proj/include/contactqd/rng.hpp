#ifndef CONTACTQD_RNG_HPP
#define CONTACTQD_RNG_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace cqd {

// Seeded generator with hand-rolled distributions so that a given seed
// produces the same stream on every standard library (std::*_distribution
// output is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    // Box-Muller; one value per draw keeps the stream order obvious.
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  std::complex<double> complex_in_disk(double radius) {
    // rejection sampling, uniform over the disk
    for (;;) {
      double x = uniform(-1.0, 1.0);
      double y = uniform(-1.0, 1.0);
      if (x * x + y * y <= 1.0) return {radius * x, radius * y};
    }
  }

  Eigen::VectorXcd complex_vector(Eigen::Index n, double radius) {
    Eigen::VectorXcd v(n);
    for (Eigen::Index k = 0; k < n; ++k) v[k] = complex_in_disk(radius);
    return v;
  }

  // Hermitian matrix with entries of order `scale`.
  Eigen::MatrixXcd hermitian(Eigen::Index n, double scale = 1.0) {
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      m(j, j) = scale * uniform(-1.0, 1.0);
      for (Eigen::Index k = j + 1; k < n; ++k) {
        std::complex<double> e = scale * complex_in_disk(1.0);
        m(j, k) = e;
        m(k, j) = std::conj(e);
      }
    }
    return m;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cqd

#endif
